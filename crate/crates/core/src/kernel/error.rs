use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A malformed `.plugin` manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestParseError {
    pub file: PathBuf,
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for ManifestParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file.display(), self.line, self.reason)
    }
}

impl std::error::Error for ManifestParseError {}

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("manifest parse error: {0}")]
    ManifestParse(#[from] ManifestParseError),
    #[error("invalid plugin descriptor {name:?}: {reason}")]
    InvalidDescriptor { name: String, reason: String },
    #[error("static plugin {0:?} registered twice")]
    DuplicateStatic(String),
    #[error("unknown plugin {0:?}")]
    UnknownPlugin(String),
    #[error("capability {key:?} required by {requirer:?} has no provider")]
    MissingCapability { key: String, requirer: String },
    #[error("capability {key:?} has several providers {providers:?} and none was requested")]
    AmbiguousProvider { key: String, providers: Vec<String> },
    #[error("dependency cycle between {0:?}")]
    DependencyCycle(Vec<String>),
    #[error("personality {0:?} not found")]
    PersonalityNotFound(String),
    #[error("plugin {plugin:?} names entry {entry:?} which has no factory")]
    UnknownEntry { plugin: String, entry: String },
    #[error("plugin {plugin:?} failed to attach: {reason}")]
    AttachFailed { plugin: String, reason: String },
    #[error("service {0:?} already installed")]
    DuplicateService(String),
    #[error("session is {found}, expected {expected}")]
    InvalidState { expected: &'static str, found: &'static str },
}
