//! Random resource-file contents and a noisy, independent text writer.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainSection {
    pub kind: String,
    pub qualifier: Option<String>,
    pub entries: Vec<(String, String)>,
}

const KINDS: [&str; 6] = ["plugins", "twig", "cuts", "config", "viewpoint", "extra"];
const WORD: &str = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-";
const VALUE_EXTRA: &[char] = &[' ', ',', '/', ':', '=', '#', '[', ']', '+', '(', ')'];

fn word<R: Rng>(rng: &mut R, min: usize, max: usize) -> String {
    let chars: Vec<char> = WORD.chars().collect();
    (0..rng.gen_range(min..=max)).map(|_| *chars.choose(rng).unwrap()).collect()
}

fn value<R: Rng>(rng: &mut R) -> String {
    let mut chars: Vec<char> = WORD.chars().collect();
    chars.extend_from_slice(VALUE_EXTRA);
    let s: String = (0..rng.gen_range(0..24)).map(|_| *chars.choose(rng).unwrap()).collect();
    s.trim().to_string()
}

pub fn random_sections<R: Rng>(rng: &mut R) -> Vec<PlainSection> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..8) {
        let kind = KINDS.choose(rng).unwrap().to_string();
        let qualifier = match rng.gen_range(0..3) {
            0 => None,
            1 => Some(word(rng, 1, 8)),
            _ => Some(format!("/{}/{}", word(rng, 1, 5), word(rng, 1, 5))),
        };
        if !seen.insert((kind.clone(), qualifier.clone())) {
            continue;
        }
        let mut keys = BTreeSet::new();
        let mut entries = Vec::new();
        for _ in 0..rng.gen_range(0..10) {
            let k = word(rng, 1, 10);
            if keys.insert(k.clone()) {
                entries.push((k, value(rng)));
            }
        }
        out.push(PlainSection {
            kind,
            qualifier,
            entries,
        });
    }
    out
}

fn pad<R: Rng>(rng: &mut R) -> &'static str {
    ["", " ", "  ", "\t"].choose(rng).unwrap()
}

/// Writes the sections with random comments, blank lines and padding.
pub fn noisy_text<R: Rng>(rng: &mut R, sections: &[PlainSection]) -> String {
    let mut out = String::new();
    let noise = |rng: &mut R, out: &mut String| {
        for _ in 0..rng.gen_range(0..3) {
            if rng.gen_bool(0.5) {
                out.push_str(&format!("{}# {}\n", pad(rng), value(rng)));
            } else {
                out.push_str(&format!("{}\n", pad(rng)));
            }
        }
    };
    for s in sections {
        noise(rng, &mut out);
        let header = match &s.qualifier {
            Some(q) => format!("{}:{}{}", s.kind, pad(rng), q),
            None => s.kind.clone(),
        };
        out.push_str(&format!("{}[{}{}{}]{}\n", pad(rng), pad(rng), header, pad(rng), pad(rng)));
        for (k, v) in &s.entries {
            noise(rng, &mut out);
            out.push_str(&format!("{}{}{}={}{}{}\n", pad(rng), k, pad(rng), pad(rng), v, pad(rng)));
        }
    }
    noise(rng, &mut out);
    out
}
