//! Vector output: viewport and occlusion culling, painter ordering and the
//! SVG / EPS writers.

mod cull;
mod eps;
mod sort;
mod svg;

use thiserror::Error;

use crate::scene::polygon::P2;
use crate::scene::Prim2D;

pub use cull::{cull_occluded, cull_viewport};
pub use eps::write_eps;
pub use sort::{depth_sort, SortOutcome};
pub use svg::write_svg;

/// Points per millimetre.
pub const PT_PER_MM: f64 = 72.0 / 25.4;
pub const DEFAULT_STROKE_MM: f64 = 0.5;

#[derive(Debug, Error)]
pub enum VgError {
    #[error("viewport has no area")]
    DegenerateViewport,
    #[error("write failed: {0}")]
    Sink(#[from] std::io::Error),
}

/// Axis-aligned window onto the projected scene, in mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub min: P2,
    pub max: P2,
}

impl Viewport {
    pub fn new(min: P2, max: P2) -> Result<Self, VgError> {
        if !(max.x > min.x && max.y > min.y) || !(max - min).iter().all(|v| v.is_finite()) {
            return Err(VgError::DegenerateViewport);
        }
        Ok(Self { min, max })
    }

    /// Smallest viewport around all primitives, padded by `margin` on each
    /// side. Falls back to a unit box for an empty or flat scene.
    pub fn fit(prims: &[Prim2D], margin: f64) -> Self {
        let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in prims {
            let (a, b) = p.bounds();
            lo = P2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = P2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        if !(hi.x >= lo.x && hi.y >= lo.y) {
            return Self {
                min: P2::new(-0.5, -0.5),
                max: P2::new(0.5, 0.5),
            };
        }
        let pad = margin.max(0.0).max(if hi.x - lo.x == 0.0 || hi.y - lo.y == 0.0 { 0.5 } else { 0.0 });
        Self {
            min: P2::new(lo.x - pad, lo.y - pad),
            max: P2::new(hi.x + pad, hi.y + pad),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CullStats {
    pub input: usize,
    pub after_viewport: usize,
    pub after_occlusion: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DocOptions {
    pub occlusion_cull: bool,
    pub stroke_mm: f64,
}

impl Default for DocOptions {
    fn default() -> Self {
        Self {
            occlusion_cull: true,
            stroke_mm: DEFAULT_STROKE_MM,
        }
    }
}

/// Primitives in final paint order (back to front) plus page geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorDoc {
    pub viewport: Viewport,
    pub prims: Vec<Prim2D>,
    pub stats: CullStats,
    pub cyclic_fallback: bool,
    pub stroke_mm: f64,
}

impl VectorDoc {
    /// Viewport cull, optional occlusion cull, then depth sort.
    pub fn build(prims: &[Prim2D], viewport: Viewport, options: DocOptions) -> Self {
        let visible = cull_viewport(prims, &viewport);
        let after_viewport = visible.len();
        let kept = if options.occlusion_cull {
            cull_occluded(&visible, options.stroke_mm)
        } else {
            visible
        };
        let stats = CullStats {
            input: prims.len(),
            after_viewport,
            after_occlusion: kept.len(),
        };
        let sorted = depth_sort(kept);
        Self {
            viewport,
            prims: sorted.prims,
            stats,
            cyclic_fallback: sorted.cyclic_fallback,
            stroke_mm: options.stroke_mm,
        }
    }

    /// Page size in points.
    pub fn page_size(&self) -> (f64, f64) {
        (self.viewport.width() * PT_PER_MM, self.viewport.height() * PT_PER_MM)
    }

    /// Page coordinates with the origin at the top left (y down).
    pub(crate) fn to_page_top_left(&self, p: &P2) -> (f64, f64) {
        (
            (p.x - self.viewport.min.x) * PT_PER_MM,
            (self.viewport.max.y - p.y) * PT_PER_MM,
        )
    }

    /// Page coordinates with the origin at the bottom left (y up).
    pub(crate) fn to_page_bottom_left(&self, p: &P2) -> (f64, f64) {
        (
            (p.x - self.viewport.min.x) * PT_PER_MM,
            (p.y - self.viewport.min.y) * PT_PER_MM,
        )
    }
}

/// Fixed three decimals, without a negative zero.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}
