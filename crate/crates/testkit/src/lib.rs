//! Independent oracles for the evd test suites.
//!
//! Nothing here calls into `evd-core`: the geometry works on plain arrays and
//! the rasterizer reads SVG text, so the checks stay independent of the code
//! under test.

pub mod dispatch;
pub mod plugins;
pub mod polyhedra;
pub mod raster;
pub mod resource;
pub mod selection;
pub mod twigs;
pub mod volumes;
