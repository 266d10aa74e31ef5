use super::Viewport;
use crate::scene::polygon::{self, P2};
use crate::scene::Prim2D;

/// Drops primitives whose bounding box misses the viewport. Anything
/// touching it is kept whole.
pub fn cull_viewport(prims: &[Prim2D], viewport: &Viewport) -> Vec<Prim2D> {
    prims
        .iter()
        .filter(|p| {
            let (lo, hi) = p.bounds();
            hi.x >= viewport.min.x && lo.x <= viewport.max.x && hi.y >= viewport.min.y && lo.y <= viewport.max.y
        })
        .cloned()
        .collect()
}

fn edges(poly: &[P2], closed: bool) -> impl Iterator<Item = (&P2, &P2)> {
    let n = poly.len();
    let count = if closed { n } else { n.saturating_sub(1) };
    (0..count).map(move |i| (&poly[i], &poly[(i + 1) % n]))
}

/// Whether `q` alone hides `p` completely.
fn hides(q: &Prim2D, p: &Prim2D, stroke_mm: f64) -> bool {
    if !q.opaque || !q.is_area() || q.outline.len() < 3 || !(q.depth_max < p.depth_min) {
        return false;
    }
    let (plo, phi) = p.bounds();
    let (qlo, qhi) = q.bounds();
    let margin = if p.is_area() { 0.0 } else { stroke_mm / 2.0 };
    if plo.x - margin < qlo.x || plo.y - margin < qlo.y || phi.x + margin > qhi.x || phi.y + margin > qhi.y {
        return false;
    }
    if !p.outline.iter().all(|v| polygon::contains(&q.outline, v)) {
        return false;
    }
    if !p.is_area()
        && p.outline.iter().any(|v| {
            edges(&q.outline, true).any(|(a, b)| polygon::distance_to_segment(v, a, b) < margin)
        })
    {
        return false;
    }
    !edges(&p.outline, p.is_area()).any(|(a, b)| edges(&q.outline, true).any(|(c, d)| polygon::segments_cross(a, b, c, d)))
}

/// Removes every primitive fully covered by one strictly nearer opaque
/// primitive. Polylines must also keep half the stroke width clear of the
/// occluder's edge.
pub fn cull_occluded(prims: &[Prim2D], stroke_mm: f64) -> Vec<Prim2D> {
    let mut order: Vec<usize> = (0..prims.len()).collect();
    order.sort_by(|&a, &b| prims[a].depth_max.total_cmp(&prims[b].depth_max));
    prims
        .iter()
        .filter(|p| {
            !order
                .iter()
                .map(|&i| &prims[i])
                .take_while(|q| q.depth_max < p.depth_min)
                .any(|q| hides(q, p, stroke_mm))
        })
        .cloned()
        .collect()
}
