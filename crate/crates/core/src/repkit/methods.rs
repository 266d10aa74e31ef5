use std::any::{type_name, Any, TypeId};
use std::collections::BTreeMap;
use std::sync::Arc;

use super::kit::RepKit;
use super::{ModelId, RepError, RepId, ReprId, ANY_KIND};

/// Everything a handler is told about the invocation.
pub struct Call<'a> {
    pub method: &'a str,
    pub object: ReprId,
    pub model: ModelId,
    pub rep: Option<RepId>,
    pub args: &'a dyn Any,
}

impl Call<'_> {
    /// The extra arguments, already checked against the declared type.
    pub fn args<T: Any>(&self) -> &T {
        self.args
            .downcast_ref::<T>()
            .expect("argument type checked at dispatch")
    }
}

pub type Handler = Arc<dyn Fn(&mut RepKit, &Call<'_>) -> Result<Box<dyn Any>, RepError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodKey {
    pub method: String,
    pub repr_kind: String,
    pub model_kind: String,
}

impl MethodKey {
    pub fn new(method: &str, repr_kind: &str, model_kind: &str) -> Self {
        Self {
            method: method.to_string(),
            repr_kind: repr_kind.to_string(),
            model_kind: model_kind.to_string(),
        }
    }
}

#[derive(Clone)]
pub(super) struct Entry {
    pub(super) handler: Handler,
    pub(super) arg_type: TypeId,
    pub(super) arg_type_name: &'static str,
    /// Identifies the entry in tests and diagnostics.
    pub(super) label: String,
}

/// Dispatch table keyed by (method, representable kind, model kind).
///
/// Within one registry a key is unique. Registries built independently may be
/// merged; a key present in both then becomes ambiguous at dispatch time
/// instead of silently preferring one side.
#[derive(Clone, Default)]
pub struct MethodRegistry {
    entries: BTreeMap<MethodKey, Vec<Entry>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `handler` whose extra arguments have type `A`.
    pub fn register<A, F>(&mut self, method: &str, repr_kind: &str, model_kind: &str, handler: F) -> Result<(), RepError>
    where
        A: Any,
        F: Fn(&mut RepKit, &Call<'_>) -> Result<Box<dyn Any>, RepError> + Send + Sync + 'static,
    {
        self.register_labeled::<A, F>(method, repr_kind, model_kind, "", handler)
    }

    pub fn register_labeled<A, F>(
        &mut self,
        method: &str,
        repr_kind: &str,
        model_kind: &str,
        label: &str,
        handler: F,
    ) -> Result<(), RepError>
    where
        A: Any,
        F: Fn(&mut RepKit, &Call<'_>) -> Result<Box<dyn Any>, RepError> + Send + Sync + 'static,
    {
        let key = MethodKey::new(method, repr_kind, model_kind);
        if self.entries.contains_key(&key) {
            return Err(RepError::DuplicateRegistration {
                method: key.method,
                repr_kind: key.repr_kind,
                model_kind: key.model_kind,
            });
        }
        self.entries.insert(
            key,
            vec![Entry {
                handler: Arc::new(handler),
                arg_type: TypeId::of::<A>(),
                arg_type_name: type_name::<A>(),
                label: label.to_string(),
            }],
        );
        Ok(())
    }

    /// Appends every entry of `other`.
    pub fn merge(&mut self, other: MethodRegistry) {
        for (key, entries) in other.entries {
            self.entries.entry(key).or_default().extend(entries);
        }
    }

    pub fn contains(&self, method: &str, repr_kind: &str, model_kind: &str) -> bool {
        self.entries
            .contains_key(&MethodKey::new(method, repr_kind, model_kind))
    }

    pub fn keys(&self) -> impl Iterator<Item = &MethodKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Picks the entry whose kind appears earliest in `kind_path`, falling
    /// back to [`ANY_KIND`].
    pub(super) fn resolve(&self, method: &str, kind_path: &[String], model_kind: &str) -> Result<&Entry, RepError> {
        let candidates = kind_path.iter().map(String::as_str).chain([ANY_KIND]);
        for kind in candidates {
            let key = MethodKey::new(method, kind, model_kind);
            match self.entries.get(&key).map(Vec::as_slice) {
                Some([entry]) => return Ok(entry),
                Some(many) if many.len() > 1 => {
                    return Err(RepError::AmbiguousMethod {
                        method: method.to_string(),
                        repr_kind: kind.to_string(),
                        model_kind: model_kind.to_string(),
                        count: many.len(),
                    })
                }
                _ => {}
            }
        }
        Err(RepError::NoMethod {
            method: method.to_string(),
            kind_path: kind_path.to_vec(),
            model_kind: model_kind.to_string(),
        })
    }

    /// Label of the entry dispatch would choose.
    pub fn resolve_label(&self, method: &str, kind_path: &[String], model_kind: &str) -> Result<&str, RepError> {
        self.resolve(method, kind_path, model_kind)
            .map(|e| e.label.as_str())
    }
}
