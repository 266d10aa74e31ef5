use std::path::PathBuf;

use evd_core::config::{parse_resource, plugin_path, serialize_resource, ResourceFile, Section};
use evd_testkit::resource::{self, PlainSection};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn model(sections: &[PlainSection]) -> ResourceFile {
    ResourceFile {
        sections: sections
            .iter()
            .map(|s| Section {
                kind: s.kind.clone(),
                qualifier: s.qualifier.clone(),
                entries: s.entries.clone(),
            })
            .collect(),
        warnings: Vec::new(),
    }
}

proptest! {
    #[test]
    fn noisy_text_parses_to_its_model(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sections = resource::random_sections(&mut rng);
        let text = resource::noisy_text(&mut rng, &sections);
        let parsed = parse_resource(&text).unwrap();
        prop_assert_eq!(&parsed, &model(&sections));
        prop_assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let rf = model(&resource::random_sections(&mut rng));
        let text = serialize_resource(&rf);
        let back = parse_resource(&text).unwrap();
        prop_assert_eq!(&back, &rf);
        prop_assert_eq!(serialize_resource(&back), text);
    }

    #[test]
    fn plugin_path_drops_empty_segments(parts in proptest::collection::vec("[a-z/]{0,6}", 0..6)) {
        let joined = parts.join(":");
        let expected: Vec<PathBuf> = parts.iter().filter(|p| !p.is_empty()).map(PathBuf::from).collect();
        prop_assert_eq!(plugin_path(&joined), expected);
    }
}
