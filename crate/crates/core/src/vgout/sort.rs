use std::collections::BTreeMap;

use crate::scene::polygon::{self, P2};
use crate::scene::Prim2D;

#[derive(Debug, Clone, PartialEq)]
pub struct SortOutcome {
    /// Back to front.
    pub prims: Vec<Prim2D>,
    /// Set when some overlapping primitives occlude each other cyclically,
    /// so no painter order can be right and mean depth was used as is.
    pub cyclic_fallback: bool,
}

/// Back-to-front by mean depth, ties broken by primId. Primitives with
/// disjoint depth intervals therefore come out farthest first.
pub fn depth_sort(mut prims: Vec<Prim2D>) -> SortOutcome {
    prims.sort_by(|a, b| b.depth_mean.total_cmp(&a.depth_mean).then(a.prim_id.cmp(&b.prim_id)));
    let cyclic_fallback = has_occlusion_cycle(&prims);
    SortOutcome { prims, cyclic_fallback }
}

/// `Some(true)` when `a` lies behind `b` where their areas overlap.
fn behind(a: &Prim2D, b: &Prim2D) -> Option<bool> {
    let ha = polygon::convex_hull(&a.outline);
    let hb = polygon::convex_hull(&b.outline);
    if ha.len() < 3 || hb.len() < 3 {
        return None;
    }
    let common = polygon::clip_to_convex(&ha, &hb);
    if common.len() < 3 || polygon::signed_area2(&common).abs() < 1e-12 {
        return None;
    }
    let probe: P2 = polygon::centroid(&common);
    let (da, db) = (a.depth_at(&probe)?, b.depth_at(&probe)?);
    if (da - db).abs() <= 1e-9 {
        None
    } else {
        Some(da > db)
    }
}

fn has_occlusion_cycle(prims: &[Prim2D]) -> bool {
    let areas: Vec<usize> = (0..prims.len()).filter(|&i| prims[i].is_area()).collect();
    let bounds: Vec<(P2, P2)> = prims.iter().map(Prim2D::bounds).collect();
    let mut edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &i) in areas.iter().enumerate() {
        for &j in &areas[k + 1..] {
            let (a, b) = (&prims[i], &prims[j]);
            if a.depth_max < b.depth_min || b.depth_max < a.depth_min {
                continue;
            }
            let ((alo, ahi), (blo, bhi)) = (bounds[i], bounds[j]);
            if ahi.x <= blo.x || bhi.x <= alo.x || ahi.y <= blo.y || bhi.y <= alo.y {
                continue;
            }
            match behind(a, b) {
                Some(true) => edges.entry(i).or_default().push(j),
                Some(false) => edges.entry(j).or_default().push(i),
                None => {}
            }
        }
    }
    // iterative three-colour DFS
    let mut colour = vec![0u8; prims.len()];
    for &start in edges.keys() {
        if colour[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        colour[start] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let out = edges.get(&node).map_or(&[][..], Vec::as_slice);
            if *next < out.len() {
                let to = out[*next];
                *next += 1;
                match colour[to] {
                    0 => {
                        colour[to] = 1;
                        stack.push((to, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                colour[node] = 2;
                stack.pop();
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::ReprId;
    use crate::scene::Rgba;

    fn flat(id: u32, depth: f64) -> Prim2D {
        Prim2D::polygon(
            id,
            ReprId(id as u64),
            &[[0.0, 0.0, depth], [1.0, 0.0, depth], [0.0, 1.0, depth]],
            Rgba::RED,
            true,
        )
    }

    fn order(out: &SortOutcome) -> Vec<u32> {
        out.prims.iter().map(|p| p.prim_id).collect()
    }

    #[test]
    fn farther_first() {
        let out = depth_sort(vec![flat(1, 5.0), flat(2, 10.0)]);
        assert_eq!(order(&out), [2, 1]);
        assert!(!out.cyclic_fallback);
    }

    #[test]
    fn ties_by_prim_id() {
        assert_eq!(order(&depth_sort(vec![flat(8, 1.0), flat(3, 1.0)])), [3, 8]);
    }

    /// Three bars around a triangle, each one raised at one end so that it
    /// passes over its successor and under its predecessor.
    fn bar(id: u32, angle: f64) -> Prim2D {
        let (s, c) = angle.sin_cos();
        let along = |t: f64, w: f64| (c * t - s * w, s * t + c * w);
        let mut pts = Vec::new();
        for (t, w) in [(-4.0, -0.5), (4.0, -0.5), (4.0, 0.5), (-4.0, 0.5)] {
            let (x, y) = along(t, w + 1.2);
            // depth goes from 0 (near) at t = -4 to 2 (far) at t = 4
            pts.push([x, y, (t + 4.0) / 4.0]);
        }
        Prim2D::polygon(id, ReprId(id as u64), &pts, Rgba::BLUE, true)
    }

    #[test]
    fn cyclic_overlap_sets_flag() {
        use std::f64::consts::PI;
        let bars: Vec<Prim2D> = (0..3).map(|k| bar(k + 1, k as f64 * 2.0 * PI / 3.0)).collect();
        let out = depth_sort(bars);
        assert!(out.cyclic_fallback);
        assert_eq!(order(&out), [1, 2, 3]);
    }
}
