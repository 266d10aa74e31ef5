//! Brute-force convex hulls and divergence-theorem volumes.

use rand::Rng;

pub type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Signed volume of a closed polyhedron with outward-wound faces, as the sum
/// of tetrahedra fanned from the origin.
pub fn volume(vertices: &[P3], faces: &[Vec<usize>]) -> f64 {
    let mut six_v = 0.0;
    for face in faces {
        let a = vertices[face[0]];
        for w in face[1..].windows(2) {
            six_v += dot(a, cross(vertices[w[0]], vertices[w[1]]));
        }
    }
    six_v / 6.0
}

/// Every directed edge is matched by exactly one opposite edge.
pub fn is_closed(faces: &[Vec<usize>]) -> bool {
    use std::collections::HashMap;
    let mut edges: HashMap<(usize, usize), i32> = HashMap::new();
    for face in faces {
        for i in 0..face.len() {
            let (a, b) = (face[i], face[(i + 1) % face.len()]);
            *edges.entry((a, b)).or_default() += 1;
        }
    }
    edges
        .iter()
        .all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
}

/// Convex hull of points in general position by testing every triple.
/// Returns compacted vertices and outward triangles.
pub fn brute_force_hull(points: &[P3]) -> (Vec<P3>, Vec<Vec<usize>>) {
    let n = points.len();
    let mut tris = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = cross(sub(points[j], points[i]), sub(points[k], points[i]));
                if dot(normal, normal) < 1e-18 {
                    continue;
                }
                let sides: Vec<f64> = (0..n)
                    .filter(|&m| m != i && m != j && m != k)
                    .map(|m| dot(normal, sub(points[m], points[i])))
                    .collect();
                if sides.iter().all(|&s| s < 0.0) {
                    tris.push([i, j, k]);
                } else if sides.iter().all(|&s| s > 0.0) {
                    tris.push([i, k, j]);
                }
            }
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    let faces = tris
        .iter()
        .map(|t| {
            t.iter()
                .map(|&i| {
                    if remap[i] == usize::MAX {
                        remap[i] = vertices.len();
                        vertices.push(points[i]);
                    }
                    remap[i]
                })
                .collect()
        })
        .collect();
    (vertices, faces)
}

/// Hull of `count` random points in a box of half-size `half` around `center`.
pub fn random_convex<R: Rng>(rng: &mut R, count: usize, center: P3, half: f64) -> (Vec<P3>, Vec<Vec<usize>>) {
    loop {
        let points: Vec<P3> = (0..count)
            .map(|_| {
                [
                    center[0] + rng.gen_range(-half..half),
                    center[1] + rng.gen_range(-half..half),
                    center[2] + rng.gen_range(-half..half),
                ]
            })
            .collect();
        let (v, f) = brute_force_hull(&points);
        if f.len() >= 4 && is_closed(&f) {
            return (v, f);
        }
    }
}

/// Axis-aligned box with outward quad faces.
pub fn cuboid(min: P3, max: P3) -> (Vec<P3>, Vec<Vec<usize>>) {
    let v = vec![
        [min[0], min[1], min[2]],
        [max[0], min[1], min[2]],
        [max[0], max[1], min[2]],
        [min[0], max[1], min[2]],
        [min[0], min[1], max[2]],
        [max[0], min[1], max[2]],
        [max[0], max[1], max[2]],
        [min[0], max[1], max[2]],
    ];
    let f = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![2, 3, 7, 6],
        vec![1, 2, 6, 5],
        vec![0, 4, 7, 3],
    ];
    (v, f)
}
