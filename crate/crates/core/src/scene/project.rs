//! Orthographic projection onto the three axis views.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Point3, Vector3};

use super::polygon::{self, P2};
use super::{PrimKind, Primitive, Rgba, SceneGraph};
use crate::repkit::ReprId;

/// Half-size of the square drawn for markers and text labels.
pub const MARKER_HALF_SIZE_MM: f64 = 1.0;

/// Viewing axis. Depth grows along the axis; smaller depth is nearer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// `(u, v, depth)` for a world point.
    pub fn map(self, p: &Point3<f64>) -> [f64; 3] {
        match self {
            Axis::Z => [p.x, p.y, p.z],
            Axis::Y => [p.x, p.z, p.y],
            Axis::X => [p.y, p.z, p.x],
        }
    }

    /// World point for image coordinates at a given depth.
    pub fn unmap(self, u: f64, v: f64, depth: f64) -> Point3<f64> {
        match self {
            Axis::Z => Point3::new(u, v, depth),
            Axis::Y => Point3::new(u, depth, v),
            Axis::X => Point3::new(depth, u, v),
        }
    }

    pub fn direction(self) -> Vector3<f64> {
        match self {
            Axis::X => Vector3::x(),
            Axis::Y => Vector3::y(),
            Axis::Z => Vector3::z(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(format!("unknown view axis {other:?} (expected X, Y or Z)")),
        }
    }
}

/// A projected primitive: its 2D outline for drawing plus the projected
/// surface (`u, v, depth` loops) for depth queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Prim2D {
    pub prim_id: u32,
    pub pick_id: ReprId,
    pub kind: PrimKind,
    /// Closed outline for area kinds, the open point list for polylines.
    pub outline: Vec<P2>,
    pub facets: Vec<Vec<[f64; 3]>>,
    pub depth_min: f64,
    pub depth_max: f64,
    pub depth_mean: f64,
    pub color: Rgba,
    pub opaque: bool,
}

impl Prim2D {
    /// A flat polygon with per-vertex depth.
    pub fn polygon(prim_id: u32, pick_id: ReprId, points: &[[f64; 3]], color: Rgba, opaque: bool) -> Self {
        let outline = points.iter().map(|p| P2::new(p[0], p[1])).collect();
        let depths: Vec<f64> = points.iter().map(|p| p[2]).collect();
        Self::assemble(prim_id, pick_id, PrimKind::Polyhedron, outline, vec![points.to_vec()], &depths, color, opaque)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        prim_id: u32,
        pick_id: ReprId,
        kind: PrimKind,
        outline: Vec<P2>,
        facets: Vec<Vec<[f64; 3]>>,
        depths: &[f64],
        color: Rgba,
        opaque: bool,
    ) -> Self {
        let depth_min = depths.iter().copied().fold(f64::INFINITY, f64::min);
        let depth_max = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let depth_mean = depths.iter().sum::<f64>() / depths.len().max(1) as f64;
        Self {
            prim_id,
            pick_id,
            kind,
            outline,
            facets,
            depth_min,
            depth_max,
            depth_mean,
            color,
            opaque,
        }
    }

    /// True for kinds drawn as filled regions.
    pub fn is_area(&self) -> bool {
        self.kind != PrimKind::Polyline
    }

    pub fn bounds(&self) -> (P2, P2) {
        let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.outline {
            lo = P2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = P2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Even-odd containment for area kinds; within the pick threshold for
    /// polylines.
    pub fn contains(&self, p: &P2) -> bool {
        if self.is_area() {
            polygon::contains(&self.outline, p)
        } else {
            self.outline
                .windows(2)
                .any(|w| polygon::distance_to_segment(p, &w[0], &w[1]) <= super::PICK_THRESHOLD_MM)
        }
    }

    /// Nearest depth of the primitive's surface above `p`, if it covers `p`.
    pub fn depth_at(&self, p: &P2) -> Option<f64> {
        if !self.contains(p) {
            return None;
        }
        match self.kind {
            PrimKind::Polyline => self.outline.windows(2).zip(self.facets[0].windows(2)).fold(None, |best, (w, d)| {
                if polygon::distance_to_segment(p, &w[0], &w[1]) > super::PICK_THRESHOLD_MM {
                    return best;
                }
                let ab = w[1] - w[0];
                let t = if ab.norm_squared() > 0.0 {
                    ((p - w[0]).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let z = d[0][2] + (d[1][2] - d[0][2]) * t;
                Some(best.map_or(z, |b: f64| b.min(z)))
            }),
            PrimKind::Marker | PrimKind::TextLabel => Some(self.depth_min),
            PrimKind::Polyhedron => {
                let mut best: Option<f64> = None;
                for facet in &self.facets {
                    if let Some(z) = facet_depth(facet, p) {
                        best = Some(best.map_or(z, |b| b.min(z)));
                    }
                }
                best.or(Some(self.depth_min))
            }
        }
    }
}

/// Depth of a planar facet at `p`, if `p` lies over the facet and the facet
/// is not seen edge-on.
fn facet_depth(facet: &[[f64; 3]], p: &P2) -> Option<f64> {
    let outline: Vec<P2> = facet.iter().map(|q| P2::new(q[0], q[1])).collect();
    if polygon::signed_area2(&outline).abs() < 1e-12 || !polygon::contains(&outline, p) {
        return None;
    }
    let mut n = Vector3::<f64>::zeros();
    for (i, a) in facet.iter().enumerate() {
        let b = &facet[(i + 1) % facet.len()];
        n.x += (a[1] - b[1]) * (a[2] + b[2]);
        n.y += (a[2] - b[2]) * (a[0] + b[0]);
        n.z += (a[0] - b[0]) * (a[1] + b[1]);
    }
    if n.z.abs() < 1e-15 {
        return None;
    }
    let a = facet[0];
    Some(a[2] - (n.x * (p.x - a[0]) + n.y * (p.y - a[1])) / n.z)
}

fn project_one(prim: &Primitive, axis: Axis) -> Prim2D {
    let mapped: Vec<[f64; 3]> = prim.placed_vertices().iter().map(|v| axis.map(v)).collect();
    let depths: Vec<f64> = mapped.iter().map(|m| m[2]).collect();
    let flat: Vec<P2> = mapped.iter().map(|m| P2::new(m[0], m[1])).collect();
    let (outline, facets) = match prim.kind {
        PrimKind::Polyhedron => {
            let facets = prim
                .faces
                .iter()
                .map(|f| f.iter().map(|&i| mapped[i]).collect())
                .collect();
            (polygon::convex_hull(&flat), facets)
        }
        PrimKind::Polyline => (flat, vec![mapped.clone()]),
        PrimKind::Marker | PrimKind::TextLabel => {
            let c = flat[0];
            let h = MARKER_HALF_SIZE_MM;
            let square = vec![
                P2::new(c.x - h, c.y - h),
                P2::new(c.x + h, c.y - h),
                P2::new(c.x + h, c.y + h),
                P2::new(c.x - h, c.y + h),
            ];
            (square, Vec::new())
        }
    };
    Prim2D::assemble(prim.prim_id, prim.pick_id, prim.kind, outline, facets, &depths, prim.color, prim.opaque)
}

/// Projects every primitive of the scene along `axis`, preserving count,
/// order and pick ids.
pub fn project(scene: &SceneGraph, axis: Axis) -> Vec<Prim2D> {
    project_primitives(&scene.flatten(), axis)
}

pub fn project_primitives(prims: &[Primitive], axis: Axis) -> Vec<Prim2D> {
    prims.iter().map(|p| project_one(p, axis)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn marker_at(x: f64, y: f64, z: f64) -> Primitive {
        Primitive::marker(1, ReprId(1), Point3::new(x, y, z), Rgba::RED)
    }

    #[test]
    fn axis_conventions() {
        let p = Point3::new(1.0, 2.0, 3.0);
        assert_eq!(Axis::Z.map(&p), [1.0, 2.0, 3.0]);
        assert_eq!(Axis::Y.map(&p), [1.0, 3.0, 2.0]);
        assert_eq!(Axis::X.map(&p), [2.0, 3.0, 1.0]);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let [u, v, d] = axis.map(&p);
            assert_eq!(axis.unmap(u, v, d), p);
        }
        assert_eq!("Y".parse::<Axis>().unwrap(), Axis::Y);
        assert!("Q".parse::<Axis>().is_err());
    }

    #[test]
    fn z_view_of_a_point() {
        let out = project(&SceneGraph::from_primitives(vec![marker_at(1.0, 2.0, 3.0)]), Axis::Z);
        assert_eq!(out[0].depth_min, 3.0);
        assert_eq!(polygon::centroid(&out[0].outline), P2::new(1.0, 2.0));
        let out = project(&SceneGraph::from_primitives(vec![marker_at(1.0, 2.0, 3.0)]), Axis::Y);
        assert_eq!(out[0].depth_min, 2.0);
        assert_eq!(polygon::centroid(&out[0].outline), P2::new(1.0, 3.0));
    }

    #[test]
    fn count_and_pick_ids_preserved() {
        let mut prims = Vec::new();
        for i in 0..7u32 {
            let o = Point3::new(i as f64 * 3.0, 0.0, 0.0);
            prims.push(Primitive::cuboid(i, ReprId(100 + i as u64), o, o + Vector3::repeat(1.0), Rgba::GREY));
        }
        let out = project(&SceneGraph::from_primitives(prims), Axis::X);
        assert_eq!(out.len(), 7);
        for (i, p) in out.iter().enumerate() {
            assert_eq!(p.pick_id, ReprId(100 + i as u64));
        }
    }

    #[test]
    fn cube_outline_and_depth() {
        let cube = Primitive::cuboid(1, ReprId(1), Point3::new(0.0, 0.0, 5.0), Point3::new(2.0, 2.0, 7.0), Rgba::GREY);
        let p = &project_primitives(&[cube], Axis::Z)[0];
        assert_eq!(p.outline.len(), 4);
        assert_eq!((p.depth_min, p.depth_max, p.depth_mean), (5.0, 7.0, 6.0));
        assert_eq!(p.depth_at(&P2::new(1.0, 1.0)), Some(5.0));
        assert_eq!(p.depth_at(&P2::new(3.0, 1.0)), None);
    }

    #[test]
    fn slanted_face_depth_is_interpolated() {
        let tri = Prim2D::polygon(
            1,
            ReprId(1),
            &[[0.0, 0.0, 0.0], [4.0, 0.0, 4.0], [0.0, 4.0, 0.0]],
            Rgba::RED,
            true,
        );
        let d = tri.depth_at(&P2::new(1.0, 1.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }
}
