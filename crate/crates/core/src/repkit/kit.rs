use std::any::Any;
use std::collections::{BTreeMap, BTreeSet};

use super::methods::{Call, MethodRegistry};
use super::model::{Model, Rep, RepContent, RepState, Represented};
use super::object::Representable;
use super::{ModelId, RepError, RepId, ReprId, COMMIT, EXPAND, REPRESENT};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Target {
    Object(ReprId, ModelId),
    Rep(RepId),
}

/// Owns representables, models and the method registry, and runs the
/// create / expand / commit operations between them.
#[derive(Default)]
pub struct RepKit {
    methods: MethodRegistry,
    objects: BTreeMap<ReprId, Representable>,
    models: BTreeMap<ModelId, Model>,
    next_object: u64,
    next_rep: u64,
    next_model: u64,
    active: BTreeSet<(String, Target)>,
    depth: usize,
}

impl RepKit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_methods(methods: MethodRegistry) -> Self {
        Self {
            methods,
            ..Self::default()
        }
    }

    pub fn methods(&self) -> &MethodRegistry {
        &self.methods
    }

    /// Mutable registry access, refused while a handler is running.
    pub fn methods_mut(&mut self) -> Result<&mut MethodRegistry, RepError> {
        if self.depth > 0 {
            return Err(RepError::RegistryBusy);
        }
        Ok(&mut self.methods)
    }

    pub fn register_method<A, F>(&mut self, method: &str, repr_kind: &str, model_kind: &str, handler: F) -> Result<(), RepError>
    where
        A: Any,
        F: Fn(&mut RepKit, &Call<'_>) -> Result<Box<dyn Any>, RepError> + Send + Sync + 'static,
    {
        self.methods_mut()?
            .register::<A, F>(method, repr_kind, model_kind, handler)
    }

    // --- objects ---

    /// Returns an id not used by any current or earlier object.
    pub fn allocate_id(&mut self) -> ReprId {
        loop {
            self.next_object += 1;
            let id = ReprId(self.next_object);
            if !self.objects.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn add_object(&mut self, object: Representable) -> Result<ReprId, RepError> {
        let id = object.id();
        if self.objects.contains_key(&id) {
            return Err(RepError::DuplicateObject(id));
        }
        self.next_object = self.next_object.max(id.0);
        self.objects.insert(id, object);
        Ok(id)
    }

    /// Removes the object and every rep of it.
    pub fn remove_object(&mut self, id: ReprId) -> Option<Representable> {
        let object = self.objects.remove(&id)?;
        for model in self.models.values_mut() {
            model.retain_objects(|o| o != id);
        }
        Some(object)
    }

    pub fn object(&self, id: ReprId) -> Result<&Representable, RepError> {
        self.objects.get(&id).ok_or(RepError::UnknownObject(id))
    }

    pub fn object_mut(&mut self, id: ReprId) -> Result<&mut Representable, RepError> {
        self.objects.get_mut(&id).ok_or(RepError::UnknownObject(id))
    }

    pub fn objects(&self) -> impl Iterator<Item = &Representable> {
        self.objects.values()
    }

    // --- models ---

    pub fn add_model(&mut self, kind: impl Into<String>) -> ModelId {
        self.next_model += 1;
        let id = ModelId(self.next_model);
        self.models.insert(id, Model::new(id, kind));
        id
    }

    pub fn model(&self, id: ModelId) -> Result<&Model, RepError> {
        self.models.get(&id).ok_or(RepError::UnknownModel(id))
    }

    pub fn model_mut(&mut self, id: ModelId) -> Result<&mut Model, RepError> {
        self.models.get_mut(&id).ok_or(RepError::UnknownModel(id))
    }

    pub fn rep(&self, model: ModelId, rep: RepId) -> Result<&Rep, RepError> {
        self.model(model)?
            .rep(rep)
            .ok_or(RepError::RepNotInModel { rep, model })
    }

    // --- dispatch ---

    /// Runs the handler registered for `method` that best matches the
    /// object's kind path and the model's kind.
    pub fn dispatch(
        &mut self,
        method: &str,
        object: ReprId,
        model: ModelId,
        rep: Option<RepId>,
        args: &dyn Any,
    ) -> Result<Box<dyn Any>, RepError> {
        let kind_path = self.object(object)?.kind_path().to_vec();
        let model_kind = self.model(model)?.kind().to_string();
        let entry = self.methods.resolve(method, &kind_path, &model_kind)?;
        if (*args).type_id() != entry.arg_type {
            return Err(RepError::SignatureMismatch {
                method: method.to_string(),
                expected: entry.arg_type_name,
            });
        }
        let handler = entry.handler.clone();

        let guard = (
            method.to_string(),
            rep.map_or(Target::Object(object, model), Target::Rep),
        );
        if !self.active.insert(guard.clone()) {
            return Err(RepError::Reentrancy {
                method: method.to_string(),
            });
        }
        self.depth += 1;
        let call = Call {
            method,
            object,
            model,
            rep,
            args,
        };
        let result = handler(self, &call);
        self.depth -= 1;
        self.active.remove(&guard);
        result
    }

    /// Creates the rep of `object` in `model`, or returns the existing one.
    pub fn make_rep(&mut self, object: ReprId, model: ModelId) -> Result<RepId, RepError> {
        if let Some(existing) = self.model(model)?.rep_for(object) {
            return Ok(existing);
        }
        let out = self.dispatch(REPRESENT, object, model, None, &())?;
        let represented = *out
            .downcast::<Represented>()
            .map_err(|_| RepError::BadReturn {
                method: REPRESENT.into(),
            })?;
        // a handler may have created the rep itself while running
        if let Some(existing) = self.model(model)?.rep_for(object) {
            return Ok(existing);
        }
        let (state, content) = match represented {
            Represented::Stub => (RepState::Stub, RepContent::Empty),
            Represented::Expanded(content) => (RepState::Expanded, content),
        };
        self.next_rep += 1;
        let id = RepId(self.next_rep);
        self.model_mut(model)?.insert(Rep {
            id,
            model,
            object,
            state,
            content,
        });
        Ok(id)
    }

    /// Fills a stub rep. Expanded reps are left untouched.
    pub fn expand_rep(&mut self, model: ModelId, rep: RepId) -> Result<(), RepError> {
        let (object, state) = {
            let r = self.rep(model, rep)?;
            (r.object, r.state)
        };
        if state != RepState::Stub {
            return Ok(());
        }
        let out = self.dispatch(EXPAND, object, model, Some(rep), &())?;
        let content = *out.downcast::<RepContent>().map_err(|_| RepError::BadReturn {
            method: EXPAND.into(),
        })?;
        let r = self.model_mut(model)?.rep_mut(rep)?;
        r.content = content;
        r.state = RepState::Expanded;
        Ok(())
    }

    /// Applies `edit` to an expanded rep's content and marks it dirty.
    pub fn edit_rep(&mut self, model: ModelId, rep: RepId, edit: impl FnOnce(&mut RepContent)) -> Result<(), RepError> {
        let r = self.model_mut(model)?.rep_mut(rep)?;
        if r.state == RepState::Stub {
            return Err(RepError::NotExpanded(rep));
        }
        edit(&mut r.content);
        r.state = RepState::Dirty;
        Ok(())
    }

    /// Writes a dirty rep back into its object's payload.
    pub fn commit_rep(&mut self, model: ModelId, rep: RepId) -> Result<(), RepError> {
        let (object, state) = {
            let r = self.rep(model, rep)?;
            (r.object, r.state)
        };
        if state != RepState::Dirty {
            return Err(RepError::NotDirty(rep));
        }
        self.dispatch(COMMIT, object, model, Some(rep), &())?;
        self.model_mut(model)?.rep_mut(rep)?.state = RepState::Expanded;
        Ok(())
    }

    /// Reps of `object` in each of `models`, in argument order. Unknown
    /// models and objects give empty lists.
    pub fn correlate(&self, object: ReprId, models: &[ModelId]) -> Vec<Vec<RepId>> {
        models
            .iter()
            .map(|m| {
                self.models
                    .get(m)
                    .map(|model| model.reps_of(object).to_vec())
                    .unwrap_or_default()
            })
            .collect()
    }
}
