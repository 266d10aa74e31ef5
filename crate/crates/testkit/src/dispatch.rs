//! Random method tables and the first-match dispatch oracle.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

pub const WILDCARD: &str = "Any";

const METHODS: [&str; 3] = ["represent", "expand", "commit"];
const MODELS: [&str; 3] = ["3d", "2d", "text"];
const KINDS: [&str; 8] = ["Track", "Muon", "Electron", "Hit", "Volume", "Ladder", "Cluster", "Jet"];

/// `(method, kind, model)` registration key.
pub type Key = (String, String, String);

#[derive(Debug, Clone)]
pub struct DispatchCase {
    /// Distinct keys in registration order; entry `i` is labelled `h{i}`.
    pub entries: Vec<Key>,
    pub method: String,
    pub kind_path: Vec<String>,
    pub model: String,
}

pub fn random_key<R: Rng>(rng: &mut R) -> Key {
    let kind = if rng.gen_bool(0.15) {
        WILDCARD
    } else {
        KINDS.choose(rng).unwrap()
    };
    (
        METHODS.choose(rng).unwrap().to_string(),
        kind.to_string(),
        MODELS.choose(rng).unwrap().to_string(),
    )
}

pub fn random_case<R: Rng>(rng: &mut R, max_entries: usize, max_depth: usize) -> DispatchCase {
    let target = rng.gen_range(0..=max_entries);
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for _ in 0..target * 2 {
        if entries.len() == target {
            break;
        }
        let k = random_key(rng);
        if seen.insert(k.clone()) {
            entries.push(k);
        }
    }
    let depth = rng.gen_range(1..=max_depth.max(1));
    let kind_path = KINDS
        .choose_multiple(rng, depth.min(KINDS.len()))
        .map(|s| s.to_string())
        .collect();
    DispatchCase {
        entries,
        method: METHODS.choose(rng).unwrap().to_string(),
        kind_path,
        model: MODELS.choose(rng).unwrap().to_string(),
    }
}

/// Index into `entries` of the handler dispatch must pick: the first kind of
/// the path (then the wildcard) that has an entry for the method and model.
pub fn first_match(entries: &[Key], method: &str, kind_path: &[String], model: &str) -> Option<usize> {
    kind_path
        .iter()
        .map(String::as_str)
        .chain(std::iter::once(WILDCARD))
        .find_map(|kind| {
            entries
                .iter()
                .position(|(m, k, v)| m == method && k == kind && v == model)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(m: &str, k: &str, v: &str) -> Key {
        (m.into(), k.into(), v.into())
    }

    #[test]
    fn most_derived_then_wildcard() {
        let entries = vec![key("represent", "Any", "3d"), key("represent", "Track", "3d")];
        let path = vec!["Muon".to_string(), "Track".to_string()];
        assert_eq!(first_match(&entries, "represent", &path, "3d"), Some(1));
        assert_eq!(first_match(&entries, "represent", &path[..1], "3d"), Some(0));
        assert_eq!(first_match(&entries, "represent", &path, "2d"), None);
    }
}
