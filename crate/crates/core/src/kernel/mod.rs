//! Minimal application kernel.
//!
//! The kernel knows nothing about graphics. It discovers plugin descriptors
//! (from `.plugin` manifests or static registration), resolves which plugins
//! must be loaded to satisfy a request, and owns the [`Session`]: the shared
//! service table that a personality and its extensions populate.

mod error;
mod manifest;
mod registry;
mod resolve;
mod session;

pub use error::{KernelError, ManifestParseError};
pub use manifest::parse_manifest;
pub use registry::{scan_plugin_dirs, Origin, PluginDescriptor, PluginRegistry, Source};
pub use resolve::{resolve_load_order, Request};
pub use session::{
    run_application, AttachError, Extension, Factories, LifecycleEvent, Personality, RunOutcome,
    ServiceHandle, Session, SessionState,
};

/// Category carried by descriptors that can act as the application's main program.
pub const PERSONALITY_CATEGORY: &str = "personality";
