//! Ray picking in 3D and point picking on projected views.

use nalgebra::{Point3, Vector3};

use super::polygon::P2;
use super::{Prim2D, PrimKind, Primitive, SceneError, SceneGraph};
use crate::repkit::ReprId;

/// Polylines, markers and labels are hit within this distance.
pub const PICK_THRESHOLD_MM: f64 = 1.0;

const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point3<f64>,
    pub direction: Vector3<f64>,
}

impl Ray {
    pub fn new(origin: Point3<f64>, direction: Vector3<f64>) -> Result<Self, SceneError> {
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(SceneError::NonUnitDirection);
        }
        Ok(Self { origin, direction })
    }

    pub fn at(&self, t: f64) -> Point3<f64> {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickResult {
    pub pick_id: ReprId,
    pub distance: f64,
}

fn better(candidate: PickResult, best: Option<PickResult>) -> bool {
    match best {
        None => true,
        Some(b) if (candidate.distance - b.distance).abs() <= TIE_EPS => candidate.pick_id < b.pick_id,
        Some(b) => candidate.distance < b.distance,
    }
}

/// Nearest positive-distance hit over all primitives in the scene.
/// Equal distances go to the smaller pick id.
pub fn pick(scene: &SceneGraph, ray: &Ray) -> Option<PickResult> {
    let mut best = None;
    for prim in scene.flatten() {
        if let Some(distance) = hit_distance(&prim, ray) {
            let candidate = PickResult {
                pick_id: prim.pick_id,
                distance,
            };
            if better(candidate, best) {
                best = Some(candidate);
            }
        }
    }
    best
}

fn hit_distance(prim: &Primitive, ray: &Ray) -> Option<f64> {
    match prim.kind {
        PrimKind::Polyhedron => hit_convex(prim, ray),
        PrimKind::Polyline => prim
            .vertices
            .windows(2)
            .filter_map(|w| ray_segment(ray, &w[0], &w[1]))
            .min_by(f64::total_cmp),
        PrimKind::Marker | PrimKind::TextLabel => {
            let p = prim.vertices[0];
            let t = (p - ray.origin).dot(&ray.direction);
            (t > 0.0 && (ray.at(t) - p).norm() <= PICK_THRESHOLD_MM).then_some(t)
        }
    }
}

/// Clips the ray against every face plane of a convex solid.
fn hit_convex(prim: &Primitive, ray: &Ray) -> Option<f64> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for face in &prim.faces {
        let pts: Vec<Point3<f64>> = face.iter().map(|&i| prim.vertices[i]).collect();
        let mut n = Vector3::zeros();
        for (i, a) in pts.iter().enumerate() {
            let b = &pts[(i + 1) % pts.len()];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        if n.norm() == 0.0 {
            continue;
        }
        let n = n.normalize();
        let denom = n.dot(&ray.direction);
        let dist = n.dot(&(ray.origin - pts[0]));
        if denom.abs() < 1e-15 {
            if dist > 0.0 {
                return None;
            }
            continue;
        }
        let t = -dist / denom;
        if denom < 0.0 {
            t_enter = t_enter.max(t);
        } else {
            t_exit = t_exit.min(t);
        }
        if t_enter > t_exit {
            return None;
        }
    }
    if t_enter > 0.0 {
        Some(t_enter)
    } else if t_exit > 0.0 && t_exit.is_finite() {
        Some(t_exit)
    } else {
        None
    }
}

/// Ray parameter of the closest approach to a segment, if within the pick
/// threshold and in front of the origin.
fn ray_segment(ray: &Ray, a: &Point3<f64>, b: &Point3<f64>) -> Option<f64> {
    let d = ray.direction;
    let e = b - a;
    let w = ray.origin - a;
    let (dd, de, ee) = (1.0, d.dot(&e), e.dot(&e));
    let (dw, ew) = (d.dot(&w), e.dot(&w));
    let denom = dd * ee - de * de;
    let s = if denom.abs() > 1e-15 && ee > 0.0 {
        ((dd * ew - de * dw) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let t = (s * de - dw) / dd;
    let on_segment = a + e * s;
    let gap = (ray.at(t) - on_segment).norm();
    (t > 0.0 && gap <= PICK_THRESHOLD_MM).then_some(t)
}

/// Among projected primitives covering `point`, the one nearest the viewer;
/// equal depths go to the smaller pick id.
pub fn pick_2d(prims: &[Prim2D], point: &P2) -> Option<ReprId> {
    let mut best: Option<PickResult> = None;
    for prim in prims {
        if let Some(depth) = prim.depth_at(point) {
            let candidate = PickResult {
                pick_id: prim.pick_id,
                distance: depth,
            };
            if better(candidate, best) {
                best = Some(candidate);
            }
        }
    }
    best.map(|b| b.pick_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{project, Axis, Rgba};

    fn cube_at(pick: u64, z: f64) -> Primitive {
        Primitive::cuboid(
            pick as u32,
            ReprId(pick),
            Point3::new(0.0, 0.0, z),
            Point3::new(1.0, 1.0, z + 1.0),
            Rgba::GREY,
        )
    }

    fn down_z() -> Ray {
        Ray::new(Point3::new(0.5, 0.5, -100.0), Vector3::z()).unwrap()
    }

    #[test]
    fn nearest_cube_wins() {
        let scene = SceneGraph::from_primitives(vec![cube_at(2, 10.0), cube_at(1, 5.0)]);
        let hit = pick(&scene, &down_z()).unwrap();
        assert_eq!(hit.pick_id, ReprId(1));
        assert!((hit.distance - 105.0).abs() < 1e-9);
    }

    #[test]
    fn miss() {
        let scene = SceneGraph::from_primitives(vec![cube_at(1, 5.0)]);
        let ray = Ray::new(Point3::new(5.0, 5.0, -100.0), Vector3::z()).unwrap();
        assert_eq!(pick(&scene, &ray), None);
        let away = Ray::new(Point3::new(0.5, 0.5, -100.0), -Vector3::z()).unwrap();
        assert_eq!(pick(&scene, &away), None);
    }

    #[test]
    fn coincident_cubes_tie_to_smaller_id() {
        let scene = SceneGraph::from_primitives(vec![cube_at(9, 5.0), cube_at(7, 5.0)]);
        assert_eq!(pick(&scene, &down_z()).unwrap().pick_id, ReprId(7));
    }

    #[test]
    fn origin_inside_solid_hits_exit_face() {
        let scene = SceneGraph::from_primitives(vec![cube_at(1, 0.0)]);
        let ray = Ray::new(Point3::new(0.5, 0.5, 0.25), Vector3::z()).unwrap();
        assert!((pick(&scene, &ray).unwrap().distance - 0.75).abs() < 1e-12);
    }

    #[test]
    fn polyline_and_marker_threshold() {
        let line = Primitive::polyline(
            1,
            ReprId(1),
            vec![Point3::new(-5.0, 0.9, 3.0), Point3::new(5.0, 0.9, 3.0)],
            Rgba::RED,
        );
        let marker = Primitive::marker(2, ReprId(2), Point3::new(0.0, 1.5, 8.0), Rgba::RED);
        let scene = SceneGraph::from_primitives(vec![line, marker]);
        let ray = Ray::new(Point3::new(0.0, 0.0, -10.0), Vector3::z()).unwrap();
        let hit = pick(&scene, &ray).unwrap();
        assert_eq!(hit.pick_id, ReprId(1));
        assert!((hit.distance - 13.0).abs() < 1e-9);

        let far = Ray::new(Point3::new(0.0, -1.0, -10.0), Vector3::z()).unwrap();
        assert_eq!(pick(&scene, &far), None);
    }

    #[test]
    fn non_unit_ray_rejected() {
        assert!(Ray::new(Point3::origin(), Vector3::new(0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn pick_2d_front_square() {
        let back = Prim2D::polygon(1, ReprId(1), &[[0.0, 0.0, 5.0], [4.0, 0.0, 5.0], [4.0, 4.0, 5.0], [0.0, 4.0, 5.0]], Rgba::RED, true);
        let front = Prim2D::polygon(2, ReprId(2), &[[1.0, 1.0, 2.0], [3.0, 1.0, 2.0], [3.0, 3.0, 2.0], [1.0, 3.0, 2.0]], Rgba::BLUE, true);
        let prims = [back.clone(), front];
        assert_eq!(pick_2d(&prims, &P2::new(2.0, 2.0)), Some(ReprId(2)));
        assert_eq!(pick_2d(&prims, &P2::new(0.5, 0.5)), Some(ReprId(1)));
        assert_eq!(pick_2d(&prims, &P2::new(9.0, 9.0)), None);
    }

    #[test]
    fn pick_2d_shared_edge_tie() {
        let left = Prim2D::polygon(1, ReprId(8), &[[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]], Rgba::RED, true);
        let right = Prim2D::polygon(2, ReprId(3), &[[1.0, 0.0, 1.0], [2.0, 0.0, 1.0], [2.0, 1.0, 1.0], [1.0, 1.0, 1.0]], Rgba::RED, true);
        assert_eq!(pick_2d(&[left, right], &P2::new(1.0, 0.5)), Some(ReprId(3)));
    }

    #[test]
    fn projected_pick_agrees_with_ray_pick() {
        let scene = SceneGraph::from_primitives(vec![cube_at(4, 10.0), cube_at(3, 2.0)]);
        let prims = project(&scene, Axis::Z);
        let hit3 = pick(&scene, &down_z()).unwrap().pick_id;
        assert_eq!(pick_2d(&prims, &P2::new(0.5, 0.5)), Some(hit3));
    }
}
