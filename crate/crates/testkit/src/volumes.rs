//! Random box-volume trees, a recursive expansion oracle and brute-force
//! axis-aligned overlap checks.

use rand::seq::SliceRandom;
use rand::Rng;

pub const MATERIALS: [&str; 4] = ["silicon", "iron", "lead", "air"];

#[derive(Debug, Clone)]
pub struct PlainLogical {
    pub name: String,
    pub material: String,
    pub sensitive: bool,
    /// Box half lengths.
    pub half: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct PlainPlacement {
    pub mother: usize,
    pub logical: usize,
    pub copy: u32,
    pub offset: [f64; 3],
}

/// Logical 0 is the root. Placements are in declaration order, and a
/// daughter always has a higher index than its mother.
#[derive(Debug, Clone)]
pub struct VolumeCase {
    pub logicals: Vec<PlainLogical>,
    pub placements: Vec<PlainPlacement>,
}

#[derive(Debug, Clone)]
pub struct PhysNode {
    pub path: Vec<(String, u32)>,
    pub logical: usize,
    pub center: [f64; 3],
}

pub fn path_string(path: &[(String, u32)]) -> String {
    path.iter().map(|(n, c)| format!("/{n}:{c}")).collect()
}

fn physical_count(case: &VolumeCase) -> usize {
    let n = case.logicals.len();
    let mut count = vec![1usize; n];
    for i in (0..n).rev() {
        count[i] = 1 + case
            .placements
            .iter()
            .filter(|p| p.mother == i)
            .map(|p| count[p.logical])
            .sum::<usize>();
    }
    count[0]
}

/// A random tree with up to `max_logicals` logical volumes and at most
/// `max_physical` physical nodes. Logical volumes may be reused in several
/// mothers.
pub fn random_case<R: Rng>(rng: &mut R, max_logicals: usize, max_physical: usize, spread: f64) -> VolumeCase {
    let n = rng.gen_range(2..=max_logicals.max(2));
    let logicals: Vec<PlainLogical> = (0..n)
        .map(|i| PlainLogical {
            name: if i == 0 { "World".into() } else { format!("L{i}") },
            material: MATERIALS.choose(rng).unwrap().to_string(),
            sensitive: i > 0 && rng.gen_bool(0.3),
            half: if i == 0 {
                [spread * 2.0; 3]
            } else {
                [rng.gen_range(1.0..10.0), rng.gen_range(1.0..10.0), rng.gen_range(1.0..10.0)]
            },
        })
        .collect();
    let mut placements: Vec<PlainPlacement> = Vec::new();
    let mut copies = std::collections::BTreeMap::new();
    for i in 1..n {
        let mothers = if rng.gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..mothers {
            let mother = rng.gen_range(0..i);
            for _ in 0..rng.gen_range(1..=3) {
                let copy = copies.entry((mother, i)).or_insert(0u32);
                placements.push(PlainPlacement {
                    mother,
                    logical: i,
                    copy: *copy,
                    offset: [
                        rng.gen_range(-spread..spread),
                        rng.gen_range(-spread..spread),
                        rng.gen_range(-spread..spread),
                    ],
                });
                *copy += 1;
            }
        }
    }
    let mut case = VolumeCase { logicals, placements };
    while physical_count(&case) > max_physical {
        case.placements.pop();
    }
    case
}

/// Every physical node, pre-order, daughters in declaration order.
pub fn expand(case: &VolumeCase) -> Vec<PhysNode> {
    fn walk(case: &VolumeCase, node: PhysNode, out: &mut Vec<PhysNode>) {
        let children: Vec<PhysNode> = case
            .placements
            .iter()
            .filter(|p| p.mother == node.logical)
            .map(|p| {
                let mut path = node.path.clone();
                path.push((case.logicals[p.logical].name.clone(), p.copy));
                PhysNode {
                    path,
                    logical: p.logical,
                    center: [
                        node.center[0] + p.offset[0],
                        node.center[1] + p.offset[1],
                        node.center[2] + p.offset[2],
                    ],
                }
            })
            .collect();
        out.push(node);
        for c in children {
            walk(case, c, out);
        }
    }
    let mut out = Vec::new();
    let root = PhysNode {
        path: vec![(case.logicals[0].name.clone(), 0)],
        logical: 0,
        center: [0.0; 3],
    };
    walk(case, root, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlainOverlap {
    pub first: String,
    pub second: String,
    pub depth: f64,
    pub protrusion: bool,
}

fn bounds(case: &VolumeCase, node: &PhysNode) -> ([f64; 3], [f64; 3]) {
    let h = case.logicals[node.logical].half;
    let c = node.center;
    (
        [c[0] - h[0], c[1] - h[1], c[2] - h[2]],
        [c[0] + h[0], c[1] + h[1], c[2] + h[2]],
    )
}

/// Sibling pairs whose boxes overlap by more than `tolerance` on every axis,
/// and daughters sticking out of their mother by more than `tolerance`.
/// Pairs are reported as (smaller path string, larger path string).
pub fn aabb_overlaps(case: &VolumeCase, tolerance: f64) -> Vec<PlainOverlap> {
    let nodes = expand(case);
    let mut out = Vec::new();
    for mother in &nodes {
        let daughters: Vec<&PhysNode> = nodes
            .iter()
            .filter(|n| n.path.len() == mother.path.len() + 1 && n.path.starts_with(&mother.path))
            .collect();
        let (mlo, mhi) = bounds(case, mother);
        for d in &daughters {
            let (lo, hi) = bounds(case, d);
            let out_by = (0..3)
                .map(|k| (hi[k] - mhi[k]).max(mlo[k] - lo[k]))
                .fold(f64::NEG_INFINITY, f64::max);
            if out_by > tolerance {
                out.push(PlainOverlap {
                    first: path_string(&mother.path),
                    second: path_string(&d.path),
                    depth: out_by,
                    protrusion: true,
                });
            }
        }
        for (i, a) in daughters.iter().enumerate() {
            for b in &daughters[i + 1..] {
                let (alo, ahi) = bounds(case, a);
                let (blo, bhi) = bounds(case, b);
                let depth = (0..3)
                    .map(|k| ahi[k].min(bhi[k]) - alo[k].max(blo[k]))
                    .fold(f64::INFINITY, f64::min);
                if depth > tolerance {
                    let (pa, pb) = (path_string(&a.path), path_string(&b.path));
                    let (first, second) = if pa <= pb { (pa, pb) } else { (pb, pa) };
                    out.push(PlainOverlap {
                        first,
                        second,
                        depth,
                        protrusion: false,
                    });
                }
            }
        }
    }
    out.sort_by(|x, y| (&x.first, &x.second, x.protrusion).cmp(&(&y.first, &y.second, y.protrusion)));
    out
}
