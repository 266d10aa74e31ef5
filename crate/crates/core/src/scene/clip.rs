//! Half-space clipping of convex polyhedra.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::{Plane, PrimKind, Primitive, SceneError, SceneGraph};
use crate::repkit::ReprId;

/// Tolerance for treating a vertex as lying on the cutting plane, relative
/// to the primitive's coordinate scale.
const ON_PLANE_REL: f64 = 1e-12;
/// Tolerance for the convexity check, relative to the coordinate scale.
const CONVEX_REL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Vertex(usize),
    Edge(usize, usize),
}

fn newell_normal(points: &[Point3<f64>]) -> Vector3<f64> {
    let mut n = Vector3::zeros();
    for (i, a) in points.iter().enumerate() {
        let b = &points[(i + 1) % points.len()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

fn scale_of(vertices: &[Point3<f64>]) -> f64 {
    vertices
        .iter()
        .map(|v| v.coords.amax())
        .fold(1.0, f64::max)
}

/// Outward plane of every non-degenerate face, through the face centroid.
pub fn face_planes(vertices: &[Point3<f64>], faces: &[Vec<usize>]) -> Vec<Plane> {
    let scale = scale_of(vertices);
    faces
        .iter()
        .filter_map(|face| {
            let pts: Vec<Point3<f64>> = face.iter().map(|&i| vertices[i]).collect();
            let n = newell_normal(&pts);
            let len = n.norm();
            if len <= f64::EPSILON * scale * scale {
                return None;
            }
            let n = n / len;
            let c = pts.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / pts.len() as f64;
            Some(Plane {
                normal: n,
                offset: n.dot(&c),
            })
        })
        .collect()
}

/// True when no vertex lies outside the plane of a face (which is what a
/// reflex edge produces).
pub fn is_convex(vertices: &[Point3<f64>], faces: &[Vec<usize>]) -> bool {
    let tol = CONVEX_REL * scale_of(vertices);
    face_planes(vertices, faces)
        .iter()
        .all(|plane| vertices.iter().all(|v| plane.distance(v) <= tol))
}

fn check_convex(prim: &Primitive) -> Result<(), SceneError> {
    if is_convex(&prim.vertices, &prim.faces) {
        Ok(())
    } else {
        Err(SceneError::NonConvexInput {
            prim_id: prim.prim_id,
        })
    }
}

/// Clips a convex polyhedron to the half-space `plane.normal · x <= plane.offset`,
/// where `x` is in the primitive's placed frame (after its own transform).
///
/// Each face is clipped edge by edge; a single cap face closes the cut.
/// Returns `None` when nothing of the solid remains, and the input unchanged
/// when the plane does not cut it.
pub fn clip_polyhedron(prim: &Primitive, plane: &Plane) -> Result<Option<Primitive>, SceneError> {
    if prim.kind != PrimKind::Polyhedron {
        return Err(SceneError::NotPolyhedron {
            prim_id: prim.prim_id,
        });
    }
    check_convex(prim)?;

    let local = plane.to_local(&prim.transform);
    let eps = ON_PLANE_REL * scale_of(&prim.vertices).max(local.offset().abs());
    let dist: Vec<f64> = prim.vertices.iter().map(|v| local.distance(v)).collect();

    if dist.iter().all(|&d| d <= eps) {
        return Ok(Some(prim.clone()));
    }
    if dist.iter().all(|&d| d >= -eps) {
        return Ok(None);
    }

    let inside = |i: usize| dist[i] <= eps;
    let on_plane = |i: usize| dist[i].abs() <= eps;

    let point_of = |key: Key| -> Point3<f64> {
        match key {
            Key::Vertex(i) => prim.vertices[i],
            Key::Edge(a, b) => {
                let (pa, pb) = (prim.vertices[a], prim.vertices[b]);
                let t = dist[a] / (dist[a] - dist[b]);
                pa + (pb - pa) * t
            }
        }
    };

    let mut faces: Vec<Vec<Key>> = Vec::with_capacity(prim.faces.len() + 1);
    let mut cap_keys: Vec<Key> = Vec::new();
    for face in &prim.faces {
        let mut out: Vec<Key> = Vec::with_capacity(face.len() + 1);
        for (k, &cur) in face.iter().enumerate() {
            let prev = face[(k + face.len() - 1) % face.len()];
            let (pin, cin) = (inside(prev), inside(cur));
            if pin != cin && !on_plane(prev) && !on_plane(cur) {
                let key = Key::Edge(prev.min(cur), prev.max(cur));
                out.push(key);
            }
            if cin {
                out.push(Key::Vertex(cur));
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        if out.len() >= 3 {
            faces.push(out);
        }
    }

    for face in &faces {
        for &key in face {
            let on_cut = match key {
                Key::Edge(..) => true,
                Key::Vertex(i) => on_plane(i),
            };
            if on_cut && !cap_keys.contains(&key) {
                cap_keys.push(key);
            }
        }
    }

    if cap_keys.len() >= 3 {
        // order the section polygon counter-clockwise about the outward normal
        let n = *local.normal();
        let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = n.cross(&helper).normalize();
        let w = n.cross(&u);
        let pts: Vec<Point3<f64>> = cap_keys.iter().map(|&k| point_of(k)).collect();
        let c = pts.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / pts.len() as f64;
        let mut order: Vec<(f64, Key)> = pts
            .iter()
            .zip(&cap_keys)
            .map(|(p, &k)| {
                let d = p.coords - c;
                (d.dot(&w).atan2(d.dot(&u)), k)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        faces.push(order.into_iter().map(|(_, k)| k).collect());
    }

    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let faces = faces
        .into_iter()
        .map(|face| {
            face.into_iter()
                .map(|key| {
                    *index.entry(key).or_insert_with(|| {
                        vertices.push(point_of(key));
                        vertices.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    Ok(Some(Primitive {
        vertices,
        faces,
        ..prim.clone()
    }))
}

/// Clips the kept part of a polyline; may split it into several runs.
fn clip_polyline(prim: &Primitive, plane: &Plane) -> Vec<Primitive> {
    let local = plane.to_local(&prim.transform);
    let mut runs: Vec<Vec<Point3<f64>>> = Vec::new();
    let mut current: Vec<Point3<f64>> = Vec::new();
    for (i, v) in prim.vertices.iter().enumerate() {
        let d = local.distance(v);
        if i > 0 {
            let prev = prim.vertices[i - 1];
            let dp = local.distance(&prev);
            if (dp <= 0.0) != (d <= 0.0) {
                let x = prev + (v - prev) * (dp / (dp - d));
                current.push(x);
                if d > 0.0 {
                    runs.push(std::mem::take(&mut current));
                }
            }
        }
        if d <= 0.0 {
            current.push(*v);
        }
    }
    runs.push(current);
    runs.into_iter()
        .filter(|r| r.len() >= 2)
        .map(|vertices| Primitive {
            vertices,
            ..prim.clone()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SliceOutcome {
    pub scene: SceneGraph,
    /// Primitives that could not be clipped; they are left unchanged.
    pub failures: Vec<(u32, SceneError)>,
}

/// Slices the primitives standing for `objects` with a world-space plane.
/// Everything else, including node structure and transforms, is untouched.
pub fn slice_per_object(scene: &SceneGraph, objects: &[ReprId], plane: &Plane) -> SliceOutcome {
    let mut out = scene.clone();
    let mut failures = Vec::new();
    let paths: Vec<String> = scene.nodes().map(|(p, _)| p.to_string()).collect();
    for path in paths {
        let world = scene.world_transform(&path).expect("node exists");
        let node_plane = plane.to_local(&world);
        let node = out.node_mut(&path).expect("cloned node");
        let mut kept = Vec::with_capacity(node.primitives.len());
        for prim in node.primitives.drain(..) {
            if !objects.contains(&prim.pick_id) {
                kept.push(prim);
                continue;
            }
            match prim.kind {
                PrimKind::Polyhedron => match clip_polyhedron(&prim, &node_plane) {
                    Ok(Some(clipped)) => kept.push(clipped),
                    Ok(None) => {}
                    Err(e) => {
                        failures.push((prim.prim_id, e));
                        kept.push(prim);
                    }
                },
                PrimKind::Polyline => kept.extend(clip_polyline(&prim, &node_plane)),
                PrimKind::Marker | PrimKind::TextLabel => {
                    let placed = prim.transform.apply(&prim.vertices[0]);
                    if node_plane.distance(&placed) <= 0.0 {
                        kept.push(prim);
                    }
                }
            }
        }
        node.primitives = kept;
    }
    SliceOutcome { scene: out, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Rgba, Transform};
    use evd_testkit::polyhedra;

    fn unit_cube(pick: u64) -> Primitive {
        Primitive::cuboid(pick as u32, ReprId(pick), Point3::origin(), Point3::new(1.0, 1.0, 1.0), Rgba::GREY)
    }

    fn arrays(p: &Primitive) -> Vec<[f64; 3]> {
        p.placed_vertices().iter().map(|v| [v.x, v.y, v.z]).collect()
    }

    fn x_plane(d: f64) -> Plane {
        Plane::new(Vector3::x(), d).unwrap()
    }

    #[test]
    fn half_cube() {
        let out = clip_polyhedron(&unit_cube(1), &x_plane(0.5)).unwrap().unwrap();
        assert!(polyhedra::is_closed(&out.faces));
        let v = polyhedra::volume(&arrays(&out), &out.faces);
        assert!((v - 0.5).abs() < 1e-12, "volume {v}");
        assert!(out.vertices.iter().all(|p| p.x <= 0.5 + 1e-12));
        assert_eq!(out.faces.len(), 6);
    }

    #[test]
    fn uncut_and_excluded() {
        let cube = unit_cube(1);
        assert_eq!(clip_polyhedron(&cube, &x_plane(2.0)).unwrap().unwrap(), cube);
        assert_eq!(clip_polyhedron(&cube, &x_plane(-1.0)).unwrap(), None);
        // touching the kept side along a face keeps everything
        assert_eq!(clip_polyhedron(&cube, &x_plane(1.0)).unwrap().unwrap(), cube);
        // touching from the excluded side leaves a flat sliver: dropped
        assert_eq!(clip_polyhedron(&cube, &x_plane(0.0)).unwrap(), None);
    }

    #[test]
    fn diagonal_cut_through_vertices() {
        // plane x + y <= 1 passes through two cube edges
        let plane = Plane::new(Vector3::new(1.0, 1.0, 0.0), 1.0).unwrap();
        let out = clip_polyhedron(&unit_cube(1), &plane).unwrap().unwrap();
        assert!(polyhedra::is_closed(&out.faces));
        let v = polyhedra::volume(&arrays(&out), &out.faces);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn corner_cut() {
        let plane = Plane::new(Vector3::new(1.0, 1.0, 1.0), 0.5).unwrap();
        let out = clip_polyhedron(&unit_cube(1), &plane).unwrap().unwrap();
        assert!(polyhedra::is_closed(&out.faces));
        let v = polyhedra::volume(&arrays(&out), &out.faces);
        assert!((v - 0.125 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn non_convex_rejected() {
        // an L-shaped prism
        let pts = [
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ];
        let mut vertices: Vec<Point3<f64>> = pts.iter().map(|&(x, y)| Point3::new(x, y, 0.0)).collect();
        vertices.extend(pts.iter().map(|&(x, y)| Point3::new(x, y, 1.0)));
        let mut faces = vec![(0..6).rev().collect::<Vec<_>>(), (6..12).collect()];
        for i in 0..6 {
            let j = (i + 1) % 6;
            faces.push(vec![i, j, j + 6, i + 6]);
        }
        let l = Primitive::polyhedron(9, ReprId(9), vertices, faces, Rgba::GREY);
        assert!(l.is_well_formed());
        assert_eq!(
            clip_polyhedron(&l, &x_plane(0.5)),
            Err(SceneError::NonConvexInput { prim_id: 9 })
        );
    }

    #[test]
    fn primitive_transform_respected() {
        let cube = unit_cube(1).with_transform(Transform::translation(10.0, 0.0, 0.0));
        let out = clip_polyhedron(&cube, &x_plane(10.25)).unwrap().unwrap();
        let v = polyhedra::volume(&arrays(&out), &out.faces);
        assert!((v - 0.25).abs() < 1e-12);
        assert!(out.placed_vertices().iter().all(|p| p.x <= 10.25 + 1e-12));
    }

    #[test]
    fn slicing_is_selective() {
        let mut scene = SceneGraph::new();
        scene.add_node("/det", Transform::translation(0.0, 0.0, 5.0)).unwrap().primitives =
            vec![unit_cube(1), unit_cube(2)];
        let out = slice_per_object(&scene, &[ReprId(2)], &x_plane(0.5));
        assert!(out.failures.is_empty());
        let prims = &out.scene.node("/det").unwrap().primitives;
        assert_eq!(prims[0], unit_cube(1));
        assert_ne!(prims[1], unit_cube(2));
        assert_eq!(out.scene.node("/det").unwrap().transform, Transform::translation(0.0, 0.0, 5.0));

        assert_eq!(slice_per_object(&scene, &[], &x_plane(0.5)).scene, scene);
        assert_eq!(slice_per_object(&scene, &[ReprId(1), ReprId(2)], &x_plane(3.0)).scene, scene);
    }

    #[test]
    fn slicing_reports_failures_and_continues() {
        let mut bad = unit_cube(3);
        bad.vertices[6] = Point3::new(0.5, 0.5, 0.5); // dent a corner inward
        let scene = SceneGraph::from_primitives(vec![bad.clone(), unit_cube(4)]);
        let out = slice_per_object(&scene, &[ReprId(3), ReprId(4)], &x_plane(0.5));
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].0, 3);
        let prims = &out.scene.node("/").unwrap().primitives;
        assert_eq!(prims[0], bad);
        assert!(prims[1].vertices.iter().all(|p| p.x <= 0.5));
    }

    #[test]
    fn polyline_slicing_splits_runs() {
        let line = Primitive::polyline(
            5,
            ReprId(5),
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            Rgba::RED,
        );
        let scene = SceneGraph::from_primitives(vec![line]);
        let out = slice_per_object(&scene, &[ReprId(5)], &x_plane(1.0));
        let prims = &out.scene.node("/").unwrap().primitives;
        assert_eq!(prims.len(), 2);
        assert!(prims.iter().flat_map(|p| &p.vertices).all(|v| v.x <= 1.0 + 1e-12));
    }
}
