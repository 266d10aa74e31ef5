//! Random plugin dependency graphs and brute-force resolution oracles.
//!
//! Plugin `p{i}` provides the single key `k{i}` and may require keys of
//! lower-numbered plugins, so the base graph is acyclic and every key has
//! exactly one provider. A [`Defect`] then optionally adds one back edge or
//! one requirement nobody provides.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainPlugin {
    pub name: String,
    pub provides: Vec<String>,
    pub requires: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defect {
    None,
    Cycle,
    Missing,
}

#[derive(Debug, Clone)]
pub struct DagCase {
    pub plugins: Vec<PlainPlugin>,
    pub requested: Vec<String>,
}

pub fn name(i: usize) -> String {
    format!("p{i:02}")
}

fn key(i: usize) -> String {
    format!("k{i:02}")
}

/// Reachable plugin indices from `start` following requirements.
fn reach(requires: &[Vec<usize>], start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for &j in &requires[i] {
            if seen.insert(j) {
                stack.push(j);
            }
        }
    }
    seen
}

pub fn random_case<R: Rng>(rng: &mut R, max_plugins: usize, defect: Defect) -> DagCase {
    let n = rng.gen_range(2..=max_plugins.max(2));
    let density = rng.gen_range(0.1..0.5);
    let mut requires: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..i).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    let mut extra: Vec<Vec<String>> = vec![Vec::new(); n];

    match defect {
        Defect::None => {}
        Defect::Cycle => {
            // make sure some plugin has a dependency to close a loop through
            let b = rng.gen_range(1..n);
            if requires[b].is_empty() {
                requires[b].push(rng.gen_range(0..b));
            }
            let below: Vec<usize> = reach(&requires, b).into_iter().collect();
            let a = *below.choose(rng).expect("b has a dependency");
            requires[a].push(b);
        }
        Defect::Missing => {
            let m = rng.gen_range(0..n);
            extra[m].push(format!("absent{m:02}"));
        }
    }

    let plugins = (0..n)
        .map(|i| PlainPlugin {
            name: name(i),
            provides: vec![key(i)],
            requires: requires[i]
                .iter()
                .map(|&j| key(j))
                .chain(extra[i].iter().cloned())
                .collect(),
        })
        .collect();

    let mut requested: Vec<String> = (0..n).filter(|_| rng.gen_bool(0.3)).map(name).collect();
    if requested.is_empty() {
        requested.push(name(rng.gen_range(0..n)));
    }
    DagCase { plugins, requested }
}

fn providers(case: &DagCase) -> BTreeMap<&str, &str> {
    case.plugins
        .iter()
        .flat_map(|p| p.provides.iter().map(move |k| (k.as_str(), p.name.as_str())))
        .collect()
}

/// Edges requirer -> provider, ignoring keys without a provider.
fn edges(case: &DagCase) -> BTreeMap<&str, BTreeSet<&str>> {
    let providers = providers(case);
    case.plugins
        .iter()
        .map(|p| {
            let deps = p
                .requires
                .iter()
                .filter_map(|k| providers.get(k.as_str()).copied())
                .collect();
            (p.name.as_str(), deps)
        })
        .collect()
}

/// Requested plugins plus everything they need, transitively.
pub fn closure(case: &DagCase) -> BTreeSet<String> {
    let edges = edges(case);
    let mut seen: BTreeSet<&str> = case.requested.iter().map(String::as_str).collect();
    let mut stack: Vec<&str> = seen.iter().copied().collect();
    while let Some(n) = stack.pop() {
        for &d in &edges[n] {
            if seen.insert(d) {
                stack.push(d);
            }
        }
    }
    seen.into_iter().map(String::from).collect()
}

/// Members of the cyclic component (within the closure) that holds the
/// smallest name, found by mutual reachability.
pub fn cycle_members(case: &DagCase) -> Option<Vec<String>> {
    let nodes: Vec<String> = closure(case).into_iter().collect();
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let edges = edges(case);
    let n = nodes.len();
    let mut r = vec![vec![false; n]; n];
    for (i, name) in nodes.iter().enumerate() {
        for d in &edges[name.as_str()] {
            r[i][index[d]] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    let first = (0..n).find(|&i| r[i][i])?;
    Some((0..n).filter(|&j| r[first][j] && r[j][first]).map(|j| nodes[j].clone()).collect())
}

/// The (key, requirer) of a requirement without provider inside the closure.
pub fn missing_capability(case: &DagCase) -> Option<(String, String)> {
    let providers = providers(case);
    let selected = closure(case);
    case.plugins
        .iter()
        .filter(|p| selected.contains(&p.name))
        .flat_map(|p| p.requires.iter().map(move |k| (k, p)))
        .find(|(k, _)| !providers.contains_key(k.as_str()))
        .map(|(k, p)| (k.clone(), p.name.clone()))
}

/// True when every provider precedes each of its requirers in `order`, and
/// `order` lists exactly the closure.
pub fn order_is_valid(case: &DagCase, order: &[String]) -> bool {
    let expected = closure(case);
    let got: BTreeSet<String> = order.iter().cloned().collect();
    if got != expected || got.len() != order.len() {
        return false;
    }
    let position: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let edges = edges(case);
    order.iter().all(|requirer| {
        edges[requirer.as_str()]
            .iter()
            .all(|provider| position[provider] < position[requirer.as_str()])
    })
}
