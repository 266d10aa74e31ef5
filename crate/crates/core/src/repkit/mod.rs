//! Object ↔ representation dispatch.
//!
//! Application objects ([`Representable`]) are mapped into browser-specific
//! [`Rep`]s held by a [`Model`]. The mapping code is looked up at run time in
//! a [`MethodRegistry`] keyed by method name, the object's kind and the
//! model's kind, so new object/view pairings can be dropped in without
//! touching existing code.

mod kit;
mod methods;
mod model;
mod object;

use std::fmt;

use thiserror::Error;

pub use kit::RepKit;
pub use methods::{Call, Handler, MethodKey, MethodRegistry};
pub use model::{Model, Rep, RepContent, RepState, Represented, TextBody};
pub use object::{Loader, Payload, Representable};

/// Kind tag matching every representable, after all specific kinds.
pub const ANY_KIND: &str = "Any";

pub const REPRESENT: &str = "represent";
pub const EXPAND: &str = "expand";
pub const COMMIT: &str = "commit";

/// Identity of a representable object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReprId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelId(pub u64);

impl fmt::Display for ReprId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum RepError {
    #[error("method {method:?} already registered for ({repr_kind}, {model_kind})")]
    DuplicateRegistration {
        method: String,
        repr_kind: String,
        model_kind: String,
    },
    #[error("no method {method:?} for kinds {kind_path:?} in a {model_kind} model")]
    NoMethod {
        method: String,
        kind_path: Vec<String>,
        model_kind: String,
    },
    #[error("{count} candidates for method {method:?} at kind {repr_kind} in a {model_kind} model")]
    AmbiguousMethod {
        method: String,
        repr_kind: String,
        model_kind: String,
        count: usize,
    },
    #[error("method {method:?} expects arguments of type {expected}")]
    SignatureMismatch { method: String, expected: &'static str },
    #[error("re-entrant dispatch of {method:?} on the same target")]
    Reentrancy { method: String },
    #[error("method registry cannot change while a dispatch is running")]
    RegistryBusy,
    #[error("handler for {method:?} returned an unexpected value")]
    BadReturn { method: String },
    #[error("representable kind path must not be empty")]
    EmptyKindPath,
    #[error("representable {0} already exists")]
    DuplicateObject(ReprId),
    #[error("unknown representable {0}")]
    UnknownObject(ReprId),
    #[error("unknown model {0:?}")]
    UnknownModel(ModelId),
    #[error("rep {rep:?} does not belong to model {model:?}")]
    RepNotInModel { rep: RepId, model: ModelId },
    #[error("rep {0:?} has no uncommitted changes")]
    NotDirty(RepId),
    #[error("rep {0:?} is still a stub")]
    NotExpanded(RepId),
    #[error("materializing representable {id} failed: {reason}")]
    Materialization { id: ReprId, reason: String },
    #[error("payload of representable {id} is not a {expected}")]
    PayloadType { id: ReprId, expected: &'static str },
    #[error("{0}")]
    Handler(String),
}
