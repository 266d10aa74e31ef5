//! Resource files, cuts and the live configuration service.

mod apply;
mod resource;
mod service;

use std::path::PathBuf;

use thiserror::Error;

pub use apply::{apply_resource, ApplyReport, ApplyTarget, PluginLoad};
pub use resource::{parse_resource, serialize_resource, ResourceFile, Section};
pub use service::{ConfigService, ConfigValue, CutSet, ValueKind};

/// Environment variable holding the colon-separated plugin directories.
pub const PLUGIN_PATH_VAR: &str = "EVD_PLUGINS";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("{key}: expected {expected}, got {found}")]
    TypeMismatch { key: String, expected: ValueKind, found: ValueKind },
    #[error("unknown configurable {0:?}")]
    UnknownKey(String),
    #[error("{key}: cannot read {text:?} as {expected}")]
    BadValue { key: String, text: String, expected: ValueKind },
}

/// Splits on `:`, dropping empty segments.
pub fn plugin_path(value: &str) -> Vec<PathBuf> {
    value.split(':').filter(|s| !s.is_empty()).map(PathBuf::from).collect()
}
