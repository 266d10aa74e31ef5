use nalgebra::{Point3, Vector3};

use super::navigate::TraversalMode;
use super::{aabb, GeomError, VolumePath, VolumeTree};
use crate::scene::{face_planes, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    /// Bounding boxes and face-normal projections overlap, but no vertex
    /// of either solid lies inside the other.
    Aabb,
    /// Confirmed by a vertex lying inside the other solid (or, for a
    /// daughter, outside its mother).
    VertexRefined,
}

impl OverlapMethod {
    pub fn tag(self) -> &'static str {
        match self {
            OverlapMethod::Aabb => "aabb",
            OverlapMethod::VertexRefined => "vertex-refined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    /// For siblings the smaller path; for a protrusion the mother.
    pub first: VolumePath,
    pub second: VolumePath,
    /// Estimated depth in mm.
    pub penetration: f64,
    pub method: OverlapMethod,
    pub protrusion: bool,
}

struct Placed {
    path: VolumePath,
    vertices: Vec<Point3<f64>>,
    planes: Vec<Plane>,
    lo: Vector3<f64>,
    hi: Vector3<f64>,
}

impl Placed {
    /// Deepest distance of any of `points` inside this solid.
    fn max_vertex_depth(&self, points: &[Point3<f64>]) -> f64 {
        points
            .iter()
            .map(|p| -self.planes.iter().map(|pl| pl.distance(p)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn projection(points: &[Point3<f64>], axis: &Vector3<f64>) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = axis.dot(&p.coords);
        (lo.min(d), hi.max(d))
    })
}

/// Smallest projected overlap over the AABB axes and the face normals of
/// both solids. Non-positive means a separating axis exists.
fn penetration(a: &Placed, b: &Placed) -> f64 {
    let boxes = (0..3)
        .map(|k| a.hi[k].min(b.hi[k]) - a.lo[k].max(b.lo[k]))
        .fold(f64::INFINITY, f64::min);
    a.planes
        .iter()
        .chain(&b.planes)
        .map(|pl| {
            let (alo, ahi) = projection(&a.vertices, pl.normal());
            let (blo, bhi) = projection(&b.vertices, pl.normal());
            ahi.min(bhi) - alo.max(blo)
        })
        .fold(boxes, f64::min)
}

impl VolumeTree {
    /// Sibling pairs and daughter/mother protrusions deeper than
    /// `tolerance`, sorted by path pair.
    pub fn find_overlaps(&self, tolerance: f64) -> Result<Vec<OverlapReport>, GeomError> {
        if !(tolerance >= 0.0) {
            return Err(GeomError::NegativeTolerance);
        }
        let mut reports = Vec::new();
        for node in self.traverse(TraversalMode::Physical)? {
            let mother_lv = &self.logicals[&node.logical];
            if mother_lv.daughters.is_empty() {
                continue;
            }
            let place = |path: VolumePath, solid: &super::Solid, world: &crate::scene::Transform| {
                let vertices = solid.placed(world);
                let planes = face_planes(&vertices, &solid.faces);
                let (lo, hi) = aabb(&vertices);
                Placed {
                    path,
                    vertices,
                    planes,
                    lo,
                    hi,
                }
            };
            let mother = place(node.path.clone(), &mother_lv.solid, &node.world);
            let daughters: Vec<Placed> = mother_lv
                .daughters
                .iter()
                .map(|p| {
                    let world = node.world.then(&p.transform);
                    place(node.path.child(&p.logical, p.copy), &self.logicals[&p.logical].solid, &world)
                })
                .collect();

            for d in &daughters {
                let outside = mother.max_outside(&d.vertices);
                if outside > tolerance {
                    reports.push(OverlapReport {
                        first: mother.path.clone(),
                        second: d.path.clone(),
                        penetration: outside,
                        method: OverlapMethod::VertexRefined,
                        protrusion: true,
                    });
                }
            }
            for (i, a) in daughters.iter().enumerate() {
                for b in &daughters[i + 1..] {
                    let depth = penetration(a, b);
                    if depth <= tolerance {
                        continue;
                    }
                    let confirmed = a.max_vertex_depth(&b.vertices) > tolerance
                        || b.max_vertex_depth(&a.vertices) > tolerance;
                    let (first, second) = if a.path <= b.path { (a, b) } else { (b, a) };
                    reports.push(OverlapReport {
                        first: first.path.clone(),
                        second: second.path.clone(),
                        penetration: depth,
                        method: if confirmed {
                            OverlapMethod::VertexRefined
                        } else {
                            OverlapMethod::Aabb
                        },
                        protrusion: false,
                    });
                }
            }
        }
        reports.sort_by(|x, y| (&x.first, &x.second).cmp(&(&y.first, &y.second)));
        Ok(reports)
    }
}

impl Placed {
    /// Largest distance of any of `points` outside this solid.
    fn max_outside(&self, points: &[Point3<f64>]) -> f64 {
        points
            .iter()
            .map(|p| self.planes.iter().map(|pl| pl.distance(p)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
