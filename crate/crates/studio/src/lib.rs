//! The studio application: event input, the single-threaded control loop,
//! the JSON-lines protocol server and the command line.

pub mod app;
pub mod cli;
pub mod control;
pub mod event;
pub mod plugins;
pub mod protocol;
pub mod reps;
pub mod server;

pub use app::{Studio, StudioError};
