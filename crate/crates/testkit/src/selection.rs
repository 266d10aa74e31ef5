//! Random selection sequences and the set-algebra oracle for them.

use std::collections::BTreeSet;

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Replace,
    Add,
    Toggle,
}

#[derive(Debug, Clone)]
pub struct Step {
    /// Index of the browser the pick came from, if any.
    pub source: Option<usize>,
    pub ids: BTreeSet<u64>,
    pub mode: Mode,
}

pub fn random_sequence<R: Rng>(rng: &mut R, browsers: usize, universe: u64, len: usize) -> Vec<Step> {
    (0..len)
        .map(|_| Step {
            source: rng.gen_bool(0.8).then(|| rng.gen_range(0..browsers)),
            ids: (0..rng.gen_range(0..4)).map(|_| rng.gen_range(1..=universe)).collect(),
            mode: match rng.gen_range(0..3) {
                0 => Mode::Replace,
                1 => Mode::Add,
                _ => Mode::Toggle,
            },
        })
        .collect()
}

/// Selection after `step`; `None` when the step must be rejected (add or
/// toggle with nothing to add or toggle).
pub fn apply(current: &BTreeSet<u64>, step: &Step) -> Option<BTreeSet<u64>> {
    match step.mode {
        Mode::Replace => Some(step.ids.clone()),
        _ if step.ids.is_empty() => None,
        Mode::Add => Some(current.union(&step.ids).copied().collect()),
        Mode::Toggle => Some(current.symmetric_difference(&step.ids).copied().collect()),
    }
}
