//! Capability negotiation: turning a load request into an ordered plugin list.

use std::collections::{BTreeMap, BTreeSet};

use super::error::KernelError;
use super::registry::{PluginDescriptor, PluginRegistry};

/// One element of a load request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    Name(String),
    Category(String),
}

impl Request {
    pub fn name(name: impl Into<String>) -> Self {
        Request::Name(name.into())
    }

    pub fn category(label: impl Into<String>) -> Self {
        Request::Category(label.into())
    }
}

/// Resolves `requested` plus the transitive providers of every required
/// capability into a load order where each provider precedes its requirers.
///
/// A required key with several providers is only accepted when at least one
/// of them was requested explicitly. The order sorts by dependency height
/// (providers as early as possible) and then by ascending name, so it is a
/// pure function of the registry and the request.
pub fn resolve_load_order<'r>(
    registry: &'r PluginRegistry,
    requested: &[Request],
) -> Result<Vec<&'r PluginDescriptor>, KernelError> {
    let mut explicit = BTreeSet::new();
    for request in requested {
        match request {
            Request::Name(name) => {
                if !registry.contains(name) {
                    return Err(KernelError::UnknownPlugin(name.clone()));
                }
                explicit.insert(name.as_str());
            }
            Request::Category(label) => {
                explicit.extend(registry.in_category(label).map(|d| d.name.as_str()));
            }
        }
    }

    // requirer -> providers it waits on
    let mut deps: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut selected: BTreeSet<&str> = explicit.clone();
    let mut pending: BTreeSet<&str> = explicit.clone();

    while let Some(name) = pending.pop_first() {
        let descriptor = &registry.get(name).expect("selected names are live");
        let edges = deps.entry(name).or_default();
        for key in &descriptor.requires {
            let providers: Vec<&str> = registry.providers_of(key).collect();
            if providers.is_empty() {
                return Err(KernelError::MissingCapability {
                    key: key.clone(),
                    requirer: name.to_string(),
                });
            }
            let chosen: Vec<&str> = {
                let requested: Vec<&str> = providers
                    .iter()
                    .copied()
                    .filter(|p| explicit.contains(p))
                    .collect();
                if !requested.is_empty() {
                    requested
                } else if providers.len() == 1 {
                    providers
                } else {
                    return Err(KernelError::AmbiguousProvider {
                        key: key.clone(),
                        providers: providers.iter().map(|p| p.to_string()).collect(),
                    });
                }
            };
            for provider in chosen {
                edges.insert(provider);
                if selected.insert(provider) {
                    pending.insert(provider);
                }
            }
        }
    }

    if let Some(cycle) = find_cycle(&selected, &deps) {
        return Err(KernelError::DependencyCycle(cycle));
    }

    // height = longest chain of requirers hanging below a plugin
    let mut requirers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (&requirer, providers) in &deps {
        for &p in providers {
            requirers.entry(p).or_default().push(requirer);
        }
    }
    let mut height: BTreeMap<&str, usize> = BTreeMap::new();
    for &name in &selected {
        compute_height(name, &requirers, &mut height);
    }

    let mut order: Vec<&str> = selected.into_iter().collect();
    order.sort_by(|a, b| height[b].cmp(&height[a]).then_with(|| a.cmp(b)));
    Ok(order
        .into_iter()
        .map(|n| registry.get(n).expect("selected names are live"))
        .collect())
}

fn compute_height<'a>(
    name: &'a str,
    requirers: &BTreeMap<&'a str, Vec<&'a str>>,
    memo: &mut BTreeMap<&'a str, usize>,
) -> usize {
    if let Some(&h) = memo.get(name) {
        return h;
    }
    let h = requirers
        .get(name)
        .map(|rs| {
            rs.iter()
                .map(|r| compute_height(r, requirers, memo) + 1)
                .max()
                .unwrap_or(0)
        })
        .unwrap_or(0);
    memo.insert(name, h);
    h
}

/// Returns the members (ascending) of the strongly connected component with
/// the smallest member name among all components that contain a cycle.
fn find_cycle(nodes: &BTreeSet<&str>, deps: &BTreeMap<&str, BTreeSet<&str>>) -> Option<Vec<String>> {
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let names: Vec<&str> = nodes.iter().copied().collect();
    let adjacency: Vec<Vec<usize>> = names
        .iter()
        .map(|n| {
            deps.get(n)
                .map(|ps| ps.iter().map(|p| index[p]).collect())
                .unwrap_or_default()
        })
        .collect();

    let components = tarjan(&adjacency);
    components
        .into_iter()
        .filter(|c| c.len() > 1 || adjacency[c[0]].contains(&c[0]))
        .map(|c| {
            let mut members: Vec<String> = c.iter().map(|&i| names[i].to_string()).collect();
            members.sort();
            members
        })
        .min_by(|a, b| a[0].cmp(&b[0]))
}

fn tarjan(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'g> {
        adjacency: &'g [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.adjacency[v].len() {
            let w = s.adjacency[v][i];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut component = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(component);
        }
    }

    let n = adjacency.len();
    let mut state = State {
        adjacency,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            visit(&mut state, v);
        }
    }
    state.out
}
