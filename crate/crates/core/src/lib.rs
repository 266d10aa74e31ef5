//! Building blocks for interactive event and detector display tools.
//!
//! * [`kernel`]: plugin registry, capability negotiation, sessions.
//! * [`repkit`]: representable objects, per-browser reps and method dispatch.
//! * [`hub`]: sites, browsers, the twig visibility tree and the message bus.
//! * [`scene`]: primitives, projections, slicing, picking and η–φ binning.
//! * [`geom`]: logical/physical volume trees, selectors and overlap checks.
//! * [`vgout`]: culled, depth-sorted SVG and EPS output.
//! * [`config`]: resource files, cuts and the live configuration service.

pub mod config;
pub mod geom;
pub mod hub;
pub mod kernel;
pub mod repkit;
pub mod scene;
pub mod vgout;
