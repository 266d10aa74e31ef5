//! Random visibility trees and a per-node ancestor-walk oracle.

use std::collections::BTreeSet;

use rand::Rng;

/// `(self_visible, descendants_visible)` for each of the three view classes.
pub type Flags = [(bool, bool); 3];

#[derive(Debug, Clone)]
pub struct PlainTwig {
    /// Index of the parent; `None` only for the root at index 0.
    pub parent: Option<usize>,
    pub name: String,
    pub binding: Option<u64>,
    pub flags: Flags,
}

/// Nodes are listed parents-first, so index order is a valid build order.
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize) -> Vec<PlainTwig> {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let hidden = rng.gen_range(0.0..0.4);
    let flags = |rng: &mut R| -> Flags {
        let mut f = [(true, true); 3];
        for slot in &mut f {
            *slot = (!rng.gen_bool(hidden), !rng.gen_bool(hidden));
        }
        f
    };
    let mut out = vec![PlainTwig {
        parent: None,
        name: String::new(),
        binding: None,
        flags: flags(rng),
    }];
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        let binding = rng.gen_bool(0.7).then_some(i as u64);
        let f = flags(rng);
        out.push(PlainTwig {
            parent: Some(parent),
            name: format!("t{i}"),
            binding,
            flags: f,
        });
    }
    out
}

/// Slash path of node `i`.
pub fn path(tree: &[PlainTwig], i: usize) -> String {
    let mut parts = Vec::new();
    let mut cur = i;
    while let Some(p) = tree[cur].parent {
        parts.push(tree[cur].name.as_str());
        cur = p;
    }
    parts.reverse();
    format!("/{}", parts.join("/"))
}

/// Bindings of nodes whose own flag is set and whose every proper ancestor
/// lets descendants through, for view class `view` (0, 1 or 2).
pub fn visible_set(tree: &[PlainTwig], view: usize) -> BTreeSet<u64> {
    (0..tree.len())
        .filter(|&i| {
            if !tree[i].flags[view].0 {
                return false;
            }
            let mut cur = tree[i].parent;
            while let Some(p) = cur {
                if !tree[p].flags[view].1 {
                    return false;
                }
                cur = tree[p].parent;
            }
            true
        })
        .filter_map(|i| tree[i].binding)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ancestor_gate() {
        let all = [(true, true); 3];
        let mut tree = vec![
            PlainTwig { parent: None, name: String::new(), binding: None, flags: all },
            PlainTwig { parent: Some(0), name: "a".into(), binding: Some(1), flags: all },
            PlainTwig { parent: Some(1), name: "b".into(), binding: Some(2), flags: all },
        ];
        assert_eq!(path(&tree, 2), "/a/b");
        assert_eq!(visible_set(&tree, 0), BTreeSet::from([1, 2]));
        tree[1].flags[0] = (true, false);
        assert_eq!(visible_set(&tree, 0), BTreeSet::from([1]));
        assert_eq!(visible_set(&tree, 1), BTreeSet::from([1, 2]));
    }
}
