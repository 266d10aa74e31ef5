use evd_core::repkit::{MethodRegistry, RepError, RepKit, Representable};
use evd_testkit::dispatch::{self, DispatchCase, Key};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn kit_for(entries: &[Key]) -> RepKit {
    let mut methods = MethodRegistry::new();
    for (i, (m, k, v)) in entries.iter().enumerate() {
        let label = format!("h{i}");
        methods
            .register::<(), _>(m, k, v, move |_, _| Ok(Box::new(label.clone())))
            .unwrap();
    }
    RepKit::with_methods(methods)
}

/// Label of the handler that actually runs, via a real dispatch.
fn dispatched(kit: &mut RepKit, case: &DispatchCase) -> Result<String, RepError> {
    let id = kit.allocate_id();
    kit.add_object(Representable::new(id, case.kind_path.clone(), ()).unwrap())?;
    let model = kit.add_model(case.model.clone());
    let out = kit.dispatch(&case.method, id, model, None, &())?;
    let label = *out.downcast::<String>().unwrap();
    kit.remove_object(id);
    Ok(label)
}

fn expected(entries: &[Key], case: &DispatchCase) -> Option<String> {
    dispatch::first_match(entries, &case.method, &case.kind_path, &case.model).map(|i| format!("h{i}"))
}

proptest! {
    #[test]
    fn dispatch_picks_the_most_derived_match(seed in any::<u64>()) {
        let case = dispatch::random_case(&mut StdRng::seed_from_u64(seed), 50, 5);
        let mut kit = kit_for(&case.entries);
        match (dispatched(&mut kit, &case), expected(&case.entries, &case)) {
            (Ok(got), Some(want)) => prop_assert_eq!(got, want),
            (Err(RepError::NoMethod { .. }), None) => {}
            (got, want) => prop_assert!(false, "got {:?}, expected {:?}", got, want),
        }
    }

    #[test]
    fn registering_elsewhere_does_not_change_resolution(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let case = dispatch::random_case(&mut rng, 50, 5);
        let before = expected(&case.entries, &case);
        let extra = dispatch::random_key(&mut rng);
        prop_assume!(!case.entries.contains(&extra));
        let mut grown = case.entries.clone();
        grown.push(extra.clone());
        let mut kit = kit_for(&grown);
        let after = dispatched(&mut kit, &case).ok();

        // the new entry only wins if it matches at a more derived kind
        let rank = |kind: &str| case.kind_path.iter().position(|k| k == kind).unwrap_or(case.kind_path.len());
        let applies = extra.0 == case.method && extra.2 == case.model
            && (extra.1 == dispatch::WILDCARD || case.kind_path.contains(&extra.1));
        let beats = applies && match dispatch::first_match(&case.entries, &case.method, &case.kind_path, &case.model) {
            None => true,
            Some(i) => rank(&extra.1) < rank(&case.entries[i].1),
        };
        if beats {
            prop_assert_eq!(after, Some(format!("h{}", grown.len() - 1)));
        } else {
            prop_assert_eq!(after, before);
        }
    }
}

#[test]
fn labels_are_visible_without_dispatch() {
    let mut methods = MethodRegistry::new();
    methods
        .register_labeled::<(), _>("represent", "Track", "3d", "track-3d", |_, _| Ok(Box::new(())))
        .unwrap();
    let path = vec!["Muon".to_string(), "Track".to_string()];
    assert_eq!(methods.resolve_label("represent", &path, "3d").unwrap(), "track-3d");
}
