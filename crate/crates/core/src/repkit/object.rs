use std::any::{type_name, Any};
use std::fmt;

use super::{RepError, ReprId};

pub type Payload = Box<dyn Any + Send>;

/// Deferred payload construction for proxies. May be retried after failure.
pub type Loader = Box<dyn FnMut() -> Result<Payload, String> + Send>;

enum Slot {
    Ready(Payload),
    Deferred(Loader),
}

/// An application object, or a proxy for one, that browsers can represent.
pub struct Representable {
    id: ReprId,
    kind_path: Vec<String>,
    slot: Slot,
    materializations: usize,
    reads: usize,
}

impl fmt::Debug for Representable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representable")
            .field("id", &self.id)
            .field("kind_path", &self.kind_path)
            .field("materialized", &self.is_materialized())
            .finish()
    }
}

impl Representable {
    /// An object whose payload is already present.
    pub fn new<S, T>(id: ReprId, kind_path: impl IntoIterator<Item = S>, payload: T) -> Result<Self, RepError>
    where
        S: Into<String>,
        T: Any + Send,
    {
        Self::with_slot(id, kind_path, Slot::Ready(Box::new(payload)))
    }

    /// A proxy whose payload is built by `loader` on first access.
    pub fn proxy<S, F>(id: ReprId, kind_path: impl IntoIterator<Item = S>, loader: F) -> Result<Self, RepError>
    where
        S: Into<String>,
        F: FnMut() -> Result<Payload, String> + Send + 'static,
    {
        Self::with_slot(id, kind_path, Slot::Deferred(Box::new(loader)))
    }

    fn with_slot<S: Into<String>>(
        id: ReprId,
        kind_path: impl IntoIterator<Item = S>,
        slot: Slot,
    ) -> Result<Self, RepError> {
        let kind_path: Vec<String> = kind_path.into_iter().map(Into::into).collect();
        if kind_path.is_empty() {
            return Err(RepError::EmptyKindPath);
        }
        Ok(Self {
            id,
            kind_path,
            slot,
            materializations: 0,
            reads: 0,
        })
    }

    pub fn id(&self) -> ReprId {
        self.id
    }

    /// Type tags, most-derived first.
    pub fn kind_path(&self) -> &[String] {
        &self.kind_path
    }

    pub fn kind(&self) -> &str {
        &self.kind_path[0]
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.slot, Slot::Ready(_))
    }

    /// How many times a proxy loader succeeded (0 or 1).
    pub fn materialization_count(&self) -> usize {
        self.materializations
    }

    /// How many times the payload was accessed.
    pub fn read_count(&self) -> usize {
        self.reads
    }

    pub fn materialize(&mut self) -> Result<(), RepError> {
        if let Slot::Deferred(loader) = &mut self.slot {
            let payload = loader().map_err(|reason| RepError::Materialization { id: self.id, reason })?;
            self.slot = Slot::Ready(payload);
            self.materializations += 1;
        }
        Ok(())
    }

    pub fn payload<T: Any>(&mut self) -> Result<&T, RepError> {
        self.materialize()?;
        self.reads += 1;
        let id = self.id;
        match &self.slot {
            Slot::Ready(p) => p.downcast_ref::<T>().ok_or(RepError::PayloadType {
                id,
                expected: type_name::<T>(),
            }),
            Slot::Deferred(_) => unreachable!("materialized above"),
        }
    }

    pub fn payload_mut<T: Any>(&mut self) -> Result<&mut T, RepError> {
        self.materialize()?;
        self.reads += 1;
        let id = self.id;
        match &mut self.slot {
            Slot::Ready(p) => p.downcast_mut::<T>().ok_or(RepError::PayloadType {
                id,
                expected: type_name::<T>(),
            }),
            Slot::Deferred(_) => unreachable!("materialized above"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_path_required() {
        let empty: [&str; 0] = [];
        assert!(matches!(
            Representable::new(ReprId(1), empty, 0u8),
            Err(RepError::EmptyKindPath)
        ));
    }

    #[test]
    fn proxy_materializes_once() {
        let mut calls = 0;
        let mut r = Representable::proxy(ReprId(1), ["Track"], move || {
            calls += 1;
            assert_eq!(calls, 1);
            Ok(Box::new(5i32) as Payload)
        })
        .unwrap();
        assert!(!r.is_materialized());
        assert_eq!(r.read_count(), 0);
        assert_eq!(*r.payload::<i32>().unwrap(), 5);
        assert_eq!(*r.payload::<i32>().unwrap(), 5);
        assert_eq!(r.materialization_count(), 1);
        assert_eq!(r.read_count(), 2);
    }

    #[test]
    fn failed_materialization_can_retry() {
        let mut attempt = 0;
        let mut r = Representable::proxy(ReprId(2), ["Track"], move || {
            attempt += 1;
            if attempt == 1 {
                Err("disk busy".into())
            } else {
                Ok(Box::new("ok") as Payload)
            }
        })
        .unwrap();
        assert!(matches!(r.materialize(), Err(RepError::Materialization { .. })));
        assert!(!r.is_materialized());
        assert_eq!(*r.payload::<&str>().unwrap(), "ok");
    }

    #[test]
    fn wrong_payload_type() {
        let mut r = Representable::new(ReprId(3), ["X"], 1u8).unwrap();
        assert!(matches!(r.payload::<String>(), Err(RepError::PayloadType { .. })));
    }
}
