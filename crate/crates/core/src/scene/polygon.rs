//! Planar polygon helpers shared by 2D picking and vector output.

use nalgebra::Point2;

pub type P2 = Point2<f64>;

fn cross(o: &P2, a: &P2, b: &P2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Twice the signed area; positive for counter-clockwise loops.
pub fn signed_area2(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&poly[i], &poly[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum()
}

pub fn distance_to_segment(p: &P2, a: &P2, b: &P2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

pub fn on_boundary(p: &P2, poly: &[P2], eps: f64) -> bool {
    let n = poly.len();
    (0..n).any(|i| distance_to_segment(p, &poly[i], &poly[(i + 1) % n]) <= eps)
}

/// Even-odd containment. Points on the boundary count as inside.
pub fn contains(poly: &[P2], p: &P2) -> bool {
    if poly.len() < 3 {
        return false;
    }
    if on_boundary(p, poly, 1e-12) {
        return true;
    }
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when the open segments `ab` and `cd` cross at a single interior
/// point of both. Touching and collinear overlap do not count.
pub fn segments_cross(a: &P2, b: &P2, c: &P2, d: &P2) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Counter-clockwise convex hull without collinear points.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Clips `subject` against a convex counter-clockwise `window`.
pub fn clip_to_convex(subject: &[P2], window: &[P2]) -> Vec<P2> {
    let mut output = subject.to_vec();
    let n = window.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let (a, b) = (window[i], window[(i + 1) % n]);
        let input = std::mem::take(&mut output);
        let side = |p: &P2| cross(&a, &b, p);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (sc, sp) = (side(&cur), side(&prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(prev + (cur - prev) * (sp / (sp - sc)));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
    }
    output
}

pub fn centroid(poly: &[P2]) -> P2 {
    let n = poly.len().max(1) as f64;
    let sum = poly.iter().fold(nalgebra::Vector2::zeros(), |acc, p| acc + p.coords);
    P2::from(sum / n)
}
