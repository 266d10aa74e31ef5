#![allow(dead_code)]

use std::path::PathBuf;

use evd_core::config::parse_resource;
use evd_studio::{reps, Studio};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A studio with the built-in rep handlers, as the `reps` plugins would
/// register them.
pub fn studio() -> Studio {
    let s = Studio::new();
    {
        let mut kit = s.kit.borrow_mut();
        let m = kit.methods_mut().unwrap();
        reps::register_event_reps(m).unwrap();
        reps::register_geometry_reps(m).unwrap();
        reps::register_text_fallback(m).unwrap();
    }
    s
}

/// The demo setup: detector, event file, cuts and viewpoints.
pub fn demo_studio() -> Studio {
    let mut s = studio();
    let rf = parse_resource(&std::fs::read_to_string(fixture("demo.res")).unwrap()).unwrap();
    s.apply_settings(&rf, &fixture("")).unwrap();
    s
}

/// The bundled events as plain JSON, read without the studio's parser.
pub fn raw_events() -> Vec<serde_json::Value> {
    std::fs::read_to_string(fixture("events.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}
