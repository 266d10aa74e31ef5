use std::any::Any;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::error::KernelError;
use super::registry::PluginRegistry;
use super::resolve::{resolve_load_order, Request};
use super::PERSONALITY_CATEGORY;

/// An installed service. Consumers downcast to the concrete interface.
pub type ServiceHandle = Arc<dyn Any + Send + Sync>;

pub type AttachError = Box<dyn std::error::Error + Send + Sync>;

/// A demand-loaded unit that adds services to a session.
///
/// `C` is the application context carried by the session.
pub trait Extension<C> {
    fn attach(&mut self, session: &mut Session<C>) -> Result<(), AttachError>;

    fn detach(&mut self, _session: &mut Session<C>) {}
}

/// The extension acting as the application's main program.
pub trait Personality<C>: Extension<C> {
    /// Extension categories loaded right after the personality attaches.
    fn categories(&self) -> Vec<String>;

    /// The control loop. Returns the process exit status.
    fn run(&mut self, session: &mut Session<C>, args: &[String]) -> i32;
}

type ExtensionFactory<C> = Box<dyn Fn() -> Box<dyn Extension<C>>>;
type PersonalityFactory<C> = Box<dyn Fn() -> Box<dyn Personality<C>>>;

/// Maps descriptor `entry` identifiers to constructors.
pub struct Factories<C> {
    extensions: BTreeMap<String, ExtensionFactory<C>>,
    personalities: BTreeMap<String, PersonalityFactory<C>>,
}

impl<C> Default for Factories<C> {
    fn default() -> Self {
        Self {
            extensions: BTreeMap::new(),
            personalities: BTreeMap::new(),
        }
    }
}

impl<C> Factories<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extension<F>(&mut self, entry: impl Into<String>, factory: F) -> &mut Self
    where
        F: Fn() -> Box<dyn Extension<C>> + 'static,
    {
        self.extensions.insert(entry.into(), Box::new(factory));
        self
    }

    pub fn personality<F>(&mut self, entry: impl Into<String>, factory: F) -> &mut Self
    where
        F: Fn() -> Box<dyn Personality<C>> + 'static,
    {
        self.personalities.insert(entry.into(), Box::new(factory));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    Created,
    Personalized,
    Running,
    Shutdown,
}

impl SessionState {
    fn label(self) -> &'static str {
        match self {
            SessionState::Created => "created",
            SessionState::Personalized => "personalized",
            SessionState::Running => "running",
            SessionState::Shutdown => "shutdown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LifecycleEvent {
    Attached(String),
    Detached(String),
}

struct Loaded<C> {
    name: String,
    extension: Box<dyn Extension<C>>,
}

struct InstalledService {
    handle: ServiceHandle,
    provider: Option<String>,
}

/// Shared application state: service table, loaded extensions, and the
/// application context.
pub struct Session<C> {
    state: SessionState,
    registry: PluginRegistry,
    factories: Factories<C>,
    services: BTreeMap<String, InstalledService>,
    loaded: Vec<Loaded<C>>,
    personality: Option<(String, Box<dyn Personality<C>>)>,
    attaching: Option<String>,
    journal: Vec<LifecycleEvent>,
    pub context: C,
}

impl<C> Session<C> {
    pub fn new(registry: PluginRegistry, factories: Factories<C>, context: C) -> Self {
        Self {
            state: SessionState::Created,
            registry,
            factories,
            services: BTreeMap::new(),
            loaded: Vec::new(),
            personality: None,
            attaching: None,
            journal: Vec::new(),
            context,
        }
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn registry(&self) -> &PluginRegistry {
        &self.registry
    }

    /// Attach/detach transcript, personality included.
    pub fn journal(&self) -> &[LifecycleEvent] {
        &self.journal
    }

    /// Names of attached extensions in load order (the personality excluded).
    pub fn loaded(&self) -> Vec<&str> {
        self.loaded.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn personality_name(&self) -> Option<&str> {
        self.personality.as_ref().map(|(n, _)| n.as_str())
    }

    pub fn is_attached(&self, name: &str) -> bool {
        self.personality_name() == Some(name) || self.loaded.iter().any(|l| l.name == name)
    }

    pub fn install_service(&mut self, key: impl Into<String>, handle: ServiceHandle) -> Result<(), KernelError> {
        if self.state == SessionState::Shutdown {
            return Err(self.state_error("not shutdown"));
        }
        let key = key.into();
        if self.services.contains_key(&key) {
            return Err(KernelError::DuplicateService(key));
        }
        let provider = self.attaching.clone();
        self.services.insert(key, InstalledService { handle, provider });
        Ok(())
    }

    /// Looks up a service. Absent keys, and every key after shutdown, give `None`.
    pub fn get_service(&self, key: &str) -> Option<ServiceHandle> {
        if self.state == SessionState::Shutdown {
            return None;
        }
        self.services.get(key).map(|s| Arc::clone(&s.handle))
    }

    pub fn service<T: Any + Send + Sync>(&self, key: &str) -> Option<Arc<T>> {
        self.get_service(key).and_then(|h| h.downcast::<T>().ok())
    }

    pub fn service_keys(&self) -> impl Iterator<Item = &str> {
        self.services.keys().map(String::as_str)
    }

    /// Attaches the personality named `name`, moving the session from
    /// created to personalized.
    pub fn attach_personality(&mut self, name: &str) -> Result<(), KernelError> {
        if self.state != SessionState::Created {
            return Err(self.state_error("created"));
        }
        let descriptor = self
            .registry
            .get(name)
            .filter(|d| d.has_category(PERSONALITY_CATEGORY))
            .ok_or_else(|| KernelError::PersonalityNotFound(name.to_string()))?;
        let factory = self
            .factories
            .personalities
            .get(&descriptor.entry)
            .ok_or_else(|| KernelError::UnknownEntry {
                plugin: name.to_string(),
                entry: descriptor.entry.clone(),
            })?;
        let mut personality = factory();
        self.attaching = Some(name.to_string());
        let result = personality.attach(self);
        self.attaching = None;
        if let Err(e) = result {
            self.drop_services_of(name);
            return Err(KernelError::AttachFailed {
                plugin: name.to_string(),
                reason: e.to_string(),
            });
        }
        self.journal.push(LifecycleEvent::Attached(name.to_string()));
        self.personality = Some((name.to_string(), personality));
        self.state = SessionState::Personalized;
        Ok(())
    }

    /// Loads every plugin carrying `category`, with its dependencies.
    pub fn load_category(&mut self, category: &str) -> Result<Vec<String>, KernelError> {
        self.load(&[Request::category(category)])
    }

    /// Resolves and attaches `requests`. Plugins already attached are
    /// skipped. If any attach fails, everything attached by this call is
    /// detached again in reverse order and the error returned.
    pub fn load(&mut self, requests: &[Request]) -> Result<Vec<String>, KernelError> {
        if !matches!(self.state, SessionState::Personalized | SessionState::Running) {
            return Err(self.state_error("personalized or running"));
        }
        let plan: Vec<(String, String)> = resolve_load_order(&self.registry, requests)?
            .into_iter()
            .filter(|d| !self.is_attached(&d.name))
            .map(|d| (d.name.clone(), d.entry.clone()))
            .collect();

        let mut attached = Vec::new();
        for (name, entry) in plan {
            if let Err(e) = self.attach_one(&name, &entry) {
                self.rollback(attached.len());
                return Err(e);
            }
            attached.push(name);
        }
        Ok(attached)
    }

    fn attach_one(&mut self, name: &str, entry: &str) -> Result<(), KernelError> {
        let factory = self
            .factories
            .extensions
            .get(entry)
            .ok_or_else(|| KernelError::UnknownEntry {
                plugin: name.to_string(),
                entry: entry.to_string(),
            })?;
        let mut extension = factory();
        self.attaching = Some(name.to_string());
        let result = extension.attach(self);
        self.attaching = None;
        match result {
            Ok(()) => {
                self.journal.push(LifecycleEvent::Attached(name.to_string()));
                self.loaded.push(Loaded {
                    name: name.to_string(),
                    extension,
                });
                Ok(())
            }
            Err(e) => {
                self.drop_services_of(name);
                Err(KernelError::AttachFailed {
                    plugin: name.to_string(),
                    reason: e.to_string(),
                })
            }
        }
    }

    fn rollback(&mut self, count: usize) {
        for _ in 0..count {
            if let Some(loaded) = self.loaded.pop() {
                self.detach_loaded(loaded);
            }
        }
    }

    fn detach_loaded(&mut self, mut loaded: Loaded<C>) {
        loaded.extension.detach(self);
        self.drop_services_of(&loaded.name);
        self.journal.push(LifecycleEvent::Detached(loaded.name));
    }

    fn drop_services_of(&mut self, name: &str) {
        self.services
            .retain(|_, s| s.provider.as_deref() != Some(name));
    }

    /// Detaches all extensions in reverse load order, then the personality.
    pub fn shutdown(&mut self) {
        if self.state == SessionState::Shutdown {
            return;
        }
        while let Some(loaded) = self.loaded.pop() {
            self.detach_loaded(loaded);
        }
        if let Some((name, mut personality)) = self.personality.take() {
            personality.detach(self);
            self.drop_services_of(&name);
            self.journal.push(LifecycleEvent::Detached(name));
        }
        self.services.clear();
        self.state = SessionState::Shutdown;
    }

    fn state_error(&self, expected: &'static str) -> KernelError {
        KernelError::InvalidState {
            expected,
            found: self.state.label(),
        }
    }
}

/// Result of [`run_application`]: the exit status and the shut-down session.
pub struct RunOutcome<C> {
    pub status: i32,
    pub session: Session<C>,
}

/// Creates a session, attaches the personality, loads the categories it
/// asks for, runs its control loop and shuts everything down again.
pub fn run_application<C>(
    registry: PluginRegistry,
    factories: Factories<C>,
    personality: &str,
    args: &[String],
    context: C,
) -> Result<RunOutcome<C>, KernelError> {
    let mut session = Session::new(registry, factories, context);
    session.attach_personality(personality)?;

    let categories = session
        .personality
        .as_ref()
        .map(|(_, p)| p.categories())
        .unwrap_or_default();
    for category in categories {
        if let Err(e) = session.load_category(&category) {
            session.shutdown();
            return Err(e);
        }
    }

    session.state = SessionState::Running;
    let (name, mut main) = session.personality.take().expect("personality attached");
    let status = main.run(&mut session, args);
    session.personality = Some((name, main));
    session.shutdown();
    Ok(RunOutcome { status, session })
}
