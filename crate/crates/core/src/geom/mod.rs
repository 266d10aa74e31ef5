//! Volume trees with logical and physical navigation, selectors and
//! overlap checks.

mod fixture;
mod navigate;
mod overlap;
mod viewpoint;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use crate::repkit::ReprId;
use crate::scene::{is_convex, Primitive, Rgba, Transform};

pub use fixture::{parse_geometry, write_geometry};
pub use navigate::{TraversalMode, TraversalNode, Usage, UsageDirection, VolumeInfo};
pub use overlap::{OverlapMethod, OverlapReport};
pub use viewpoint::{subtree_view, SceneSettings, Viewpoint};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("daughter graph has a cycle through {0:?}")]
    CycleDetected(Vec<String>),
    #[error("unknown logical volume {0:?}")]
    UnknownLogical(String),
    #[error("logical volume {0:?} already exists")]
    DuplicateLogical(String),
    #[error("{mother:?} already places {logical:?} with copy number {copy}")]
    DuplicatePlacement { mother: String, logical: String, copy: u32 },
    #[error("path {0:?} does not resolve")]
    UnresolvablePath(String),
    #[error("unknown viewpoint {0:?}")]
    UnknownViewpoint(String),
    #[error("shape of {0:?} is not a closed convex polyhedron")]
    BadShape(String),
    #[error("tree has no root volume")]
    NoRoot,
    #[error("tolerance must be non-negative")]
    NegativeTolerance,
    #[error("line {line}: {reason}")]
    Fixture { line: usize, reason: String },
}

/// Convex polyhedron in the volume's local frame (mm).
#[derive(Debug, Clone, PartialEq)]
pub struct Solid {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<Vec<usize>>,
}

impl Solid {
    /// Box centred on the origin.
    pub fn cuboid(hx: f64, hy: f64, hz: f64) -> Self {
        let p = Primitive::cuboid(
            0,
            ReprId(0),
            Point3::new(-hx, -hy, -hz),
            Point3::new(hx, hy, hz),
            Rgba::GREY,
        );
        Self {
            vertices: p.vertices,
            faces: p.faces,
        }
    }

    pub fn is_valid(&self) -> bool {
        let prim = self.to_primitive(0, ReprId(0), Rgba::GREY, Transform::identity());
        prim.is_well_formed() && is_convex(&self.vertices, &self.faces)
    }

    pub fn placed(&self, world: &Transform) -> Vec<Point3<f64>> {
        self.vertices.iter().map(|v| world.apply(v)).collect()
    }

    pub fn to_primitive(&self, prim_id: u32, pick_id: ReprId, color: Rgba, world: Transform) -> Primitive {
        Primitive::polyhedron(prim_id, pick_id, self.vertices.clone(), self.faces.clone(), color).with_transform(world)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub logical: String,
    /// Relative to the mother volume.
    pub transform: Transform,
    pub copy: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalVolume {
    pub name: String,
    pub material: String,
    pub sensitive: bool,
    pub solid: Solid,
    pub daughters: Vec<Placement>,
}

impl LogicalVolume {
    pub fn new(name: impl Into<String>, material: impl Into<String>, sensitive: bool, solid: Solid) -> Self {
        Self {
            name: name.into(),
            material: material.into(),
            sensitive,
            solid,
            daughters: Vec::new(),
        }
    }
}

/// Physical volume address: `(logical name, copy number)` steps from the
/// root. Written as `/World:0/Tracker:0/Ladder:3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VolumePath(pub Vec<(String, u32)>);

impl VolumePath {
    pub fn root(name: impl Into<String>) -> Self {
        Self(vec![(name.into(), 0)])
    }

    pub fn child(&self, logical: &str, copy: u32) -> Self {
        let mut steps = self.0.clone();
        steps.push((logical.to_string(), copy));
        Self(steps)
    }

    pub fn last_logical(&self) -> &str {
        self.0.last().map_or("", |(name, _)| name.as_str())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn starts_with(&self, prefix: &VolumePath) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl fmt::Display for VolumePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, copy) in &self.0 {
            write!(f, "/{name}:{copy}")?;
        }
        Ok(())
    }
}

impl FromStr for VolumePath {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, GeomError> {
        let bad = || GeomError::UnresolvablePath(s.to_string());
        let rest = s.strip_prefix('/').ok_or_else(bad)?;
        let steps = rest
            .split('/')
            .map(|step| {
                let (name, copy) = step.rsplit_once(':').ok_or_else(bad)?;
                if name.is_empty() {
                    return Err(bad());
                }
                Ok((name.to_string(), copy.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self(steps))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VolumeTree {
    logicals: BTreeMap<String, LogicalVolume>,
    root: Option<String>,
}

impl VolumeTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_logical(&mut self, volume: LogicalVolume) -> Result<(), GeomError> {
        if self.logicals.contains_key(&volume.name) {
            return Err(GeomError::DuplicateLogical(volume.name));
        }
        if !volume.solid.is_valid() {
            return Err(GeomError::BadShape(volume.name));
        }
        self.logicals.insert(volume.name.clone(), volume);
        Ok(())
    }

    /// Appends a daughter placement to `mother`. Cycles are detected when
    /// the tree is traversed or validated.
    pub fn place(&mut self, mother: &str, logical: &str, copy: u32, transform: Transform) -> Result<(), GeomError> {
        if !self.logicals.contains_key(logical) {
            return Err(GeomError::UnknownLogical(logical.to_string()));
        }
        let m = self
            .logicals
            .get_mut(mother)
            .ok_or_else(|| GeomError::UnknownLogical(mother.to_string()))?;
        if m.daughters.iter().any(|p| p.logical == logical && p.copy == copy) {
            return Err(GeomError::DuplicatePlacement {
                mother: mother.to_string(),
                logical: logical.to_string(),
                copy,
            });
        }
        m.daughters.push(Placement {
            logical: logical.to_string(),
            transform,
            copy,
        });
        Ok(())
    }

    pub fn set_root(&mut self, name: &str) -> Result<(), GeomError> {
        if !self.logicals.contains_key(name) {
            return Err(GeomError::UnknownLogical(name.to_string()));
        }
        self.root = Some(name.to_string());
        Ok(())
    }

    pub fn root(&self) -> Result<&LogicalVolume, GeomError> {
        let name = self.root.as_ref().ok_or(GeomError::NoRoot)?;
        Ok(&self.logicals[name])
    }

    pub fn root_path(&self) -> Result<VolumePath, GeomError> {
        Ok(VolumePath::root(&self.root()?.name))
    }

    pub fn logical(&self, name: &str) -> Result<&LogicalVolume, GeomError> {
        self.logicals
            .get(name)
            .ok_or_else(|| GeomError::UnknownLogical(name.to_string()))
    }

    pub fn logicals(&self) -> impl Iterator<Item = &LogicalVolume> {
        self.logicals.values()
    }

    /// Fails with `CycleDetected` if some logical contains itself.
    pub fn validate(&self) -> Result<(), GeomError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        fn visit<'a>(
            tree: &'a VolumeTree,
            name: &'a str,
            marks: &mut BTreeMap<&'a str, Mark>,
            stack: &mut Vec<&'a str>,
        ) -> Result<(), GeomError> {
            match marks.get(name) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Open) => {
                    let start = stack.iter().position(|s| *s == name).unwrap_or(0);
                    return Err(GeomError::CycleDetected(
                        stack[start..].iter().map(|s| s.to_string()).collect(),
                    ));
                }
                None => {}
            }
            marks.insert(name, Mark::Open);
            stack.push(name);
            for d in &tree.logicals[name].daughters {
                visit(tree, &d.logical, marks, stack)?;
            }
            stack.pop();
            marks.insert(name, Mark::Done);
            Ok(())
        }
        let mut marks = BTreeMap::new();
        for name in self.logicals.keys() {
            visit(self, name, &mut marks, &mut Vec::new())?;
        }
        Ok(())
    }
}

/// Convenience for tests and fixtures: a translation-only placement.
pub fn shift(x: f64, y: f64, z: f64) -> Transform {
    Transform::translation(x, y, z)
}

pub(crate) fn aabb(points: &[Point3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(&p.coords);
        hi = hi.sup(&p.coords);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_text_round_trip() {
        let p: VolumePath = "/World:0/Tracker:0/Ladder:3".parse().unwrap();
        assert_eq!(p.depth(), 3);
        assert_eq!(p.last_logical(), "Ladder");
        assert_eq!(p.to_string(), "/World:0/Tracker:0/Ladder:3");
        assert!("World:0".parse::<VolumePath>().is_err());
        assert!("/World".parse::<VolumePath>().is_err());
        assert!("/World:x".parse::<VolumePath>().is_err());
    }

    #[test]
    fn cycle_detection() {
        let mut t = VolumeTree::new();
        for n in ["A", "B", "C"] {
            t.add_logical(LogicalVolume::new(n, "air", false, Solid::cuboid(1.0, 1.0, 1.0))).unwrap();
        }
        t.place("A", "B", 0, shift(0.0, 0.0, 0.0)).unwrap();
        t.place("B", "C", 0, shift(0.0, 0.0, 0.0)).unwrap();
        t.validate().unwrap();
        t.place("C", "B", 0, shift(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(t.validate(), Err(GeomError::CycleDetected(vec!["B".into(), "C".into()])));
    }

    #[test]
    fn placement_uniqueness() {
        let mut t = VolumeTree::new();
        for n in ["A", "B"] {
            t.add_logical(LogicalVolume::new(n, "air", false, Solid::cuboid(1.0, 1.0, 1.0))).unwrap();
        }
        t.place("A", "B", 0, shift(0.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            t.place("A", "B", 0, shift(1.0, 0.0, 0.0)),
            Err(GeomError::DuplicatePlacement { .. })
        ));
        t.place("A", "B", 1, shift(1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(t.place("A", "Z", 0, shift(0.0, 0.0, 0.0)), Err(GeomError::UnknownLogical(_))));
    }

    #[test]
    fn bad_shapes_rejected() {
        let mut t = VolumeTree::new();
        let mut s = Solid::cuboid(1.0, 1.0, 1.0);
        s.faces.pop();
        assert!(matches!(
            t.add_logical(LogicalVolume::new("X", "air", false, s)),
            Err(GeomError::BadShape(_))
        ));
    }
}
