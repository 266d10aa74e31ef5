//! Geometric core: primitives and scene graphs, orthographic and η–φ
//! projections, half-space slicing and picking.
//!
//! Lengths are millimetres throughout.

mod clip;
mod etaphi;
mod fixture;
mod graph;
pub mod polygon;
mod pick;
mod primitive;
mod project;

use nalgebra::{Matrix3, Point3, Vector3};
use thiserror::Error;

pub use clip::{clip_polyhedron, face_planes, is_convex, slice_per_object, SliceOutcome};
pub use etaphi::{azimuth, eta_phi_project, pseudorapidity, EnergyDeposit, EtaPhiMap};
pub use fixture::{parse_scene, write_scene};
pub use graph::{SceneGraph, SceneNode};
pub use pick::{pick, pick_2d, PickResult, Ray, PICK_THRESHOLD_MM};
pub use primitive::{PrimKind, Primitive, Rgba};
pub use project::{project, project_primitives, Axis, Prim2D, MARKER_HALF_SIZE_MM};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SceneError {
    #[error("rotation is not orthonormal")]
    NotOrthonormal,
    #[error("plane normal has zero length")]
    DegenerateNormal,
    #[error("primitive {prim_id} is not a convex polyhedron")]
    NonConvexInput { prim_id: u32 },
    #[error("primitive {prim_id} is not a polyhedron")]
    NotPolyhedron { prim_id: u32 },
    #[error("scene node {0:?} already exists")]
    DuplicateNode(String),
    #[error("scene node {0:?} has no parent node")]
    MissingParent(String),
    #[error("unknown scene node {0:?}")]
    UnknownNode(String),
    #[error("bin widths must be positive")]
    BadBinWidth,
    #[error("deposit {index} lies on the beam axis")]
    OnAxisDeposit { index: usize },
    #[error("ray direction must have unit length")]
    NonUnitDirection,
    #[error("line {line}: {reason}")]
    Fixture { line: usize, reason: String },
    #[error("cannot parse {0:?} as a plane (expected nx,ny,nz,d)")]
    BadPlane(String),
}

/// Rigid placement: rotation followed by translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn translation(x: f64, y: f64, z: f64) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::new(x, y, z),
        }
    }

    /// Checks orthonormality within 1e-9.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, SceneError> {
        let err = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if err > 1e-9 {
            return Err(SceneError::NotOrthonormal);
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    /// Rotation by `angle` radians about the z axis.
    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            translation: Vector3::zeros(),
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation_part(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == Matrix3::identity() && self.translation == Vector3::zeros()
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn then(&self, inner: &Transform) -> Transform {
        Transform {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
        }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> Transform {
        let rt = self.rotation.transpose();
        Transform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn max_abs_diff(&self, other: &Transform) -> f64 {
        let r = (self.rotation - other.rotation).abs().max();
        let t = (self.translation - other.translation).abs().max();
        r.max(t)
    }
}

/// The half-space `normal · x <= offset` is kept by slicing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Vector3<f64>,
    offset: f64,
}

impl Plane {
    /// Normalizes `normal`, scaling `offset` to match.
    pub fn new(normal: Vector3<f64>, offset: f64) -> Result<Self, SceneError> {
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(SceneError::DegenerateNormal);
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    pub fn normal(&self) -> &Vector3<f64> {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance; negative inside the kept half-space.
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    pub fn flipped(&self) -> Plane {
        Plane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    /// The same plane expressed in the local frame of `placement`.
    pub fn to_local(&self, placement: &Transform) -> Plane {
        let n = placement.rotation.transpose() * self.normal;
        Plane {
            normal: n,
            offset: self.offset - self.normal.dot(&placement.translation),
        }
    }

    /// Parses `"nx,ny,nz,d"`.
    pub fn parse(text: &str) -> Result<Plane, SceneError> {
        let bad = || SceneError::BadPlane(text.to_string());
        let nums: Vec<f64> = text
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [nx, ny, nz, d] = nums[..] else {
            return Err(bad());
        };
        Plane::new(Vector3::new(nx, ny, nz), d).map_err(|_| bad())
    }
}
