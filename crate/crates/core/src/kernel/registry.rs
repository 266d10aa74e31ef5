use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::error::{KernelError, ManifestParseError};
use super::manifest::parse_manifest;

/// Where a descriptor came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Static,
    Manifest(PathBuf),
}

/// The negotiation data of one plugin: what it offers and what it needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluginDescriptor {
    pub name: String,
    pub categories: BTreeSet<String>,
    pub provides: BTreeSet<String>,
    pub requires: BTreeSet<String>,
    /// Factory identifier looked up in the application's factory table.
    pub entry: String,
    pub origin: Origin,
}

impl PluginDescriptor {
    pub fn new(name: impl Into<String>, entry: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            categories: BTreeSet::new(),
            provides: BTreeSet::new(),
            requires: BTreeSet::new(),
            entry: entry.into(),
            origin: Origin::Static,
        }
    }

    pub fn category(mut self, label: impl Into<String>) -> Self {
        self.categories.insert(label.into());
        self
    }

    pub fn provides(mut self, key: impl Into<String>) -> Self {
        self.provides.insert(key.into());
        self
    }

    pub fn requires(mut self, key: impl Into<String>) -> Self {
        self.requires.insert(key.into());
        self
    }

    pub fn has_category(&self, label: &str) -> bool {
        self.categories.contains(label)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let invalid = |reason: &str| KernelError::InvalidDescriptor {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.is_empty() {
            return Err(invalid("empty name"));
        }
        if self.entry.is_empty() {
            return Err(invalid("empty entry"));
        }
        if let Some(key) = self.provides.intersection(&self.requires).next() {
            return Err(invalid(&format!("capability {key:?} both provided and required")));
        }
        Ok(())
    }
}

/// A source the registry was populated from, in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Static,
    Directory(PathBuf),
}

/// Live plugin descriptors plus a capability index.
///
/// Name collisions keep exactly one live descriptor. Precedence is static
/// registration, then earlier directories, then later ones; the losers are
/// recorded in [`warnings`](Self::warnings).
#[derive(Debug, Default, Clone)]
pub struct PluginRegistry {
    descriptors: BTreeMap<String, PluginDescriptor>,
    providers: BTreeMap<String, BTreeSet<String>>,
    sources: Vec<Source>,
    warnings: Vec<String>,
    errors: Vec<ManifestParseError>,
}

/// Builds a registry from `<name>.plugin` manifests in `dirs`, earlier
/// directories shadowing later ones.
pub fn scan_plugin_dirs<P: AsRef<Path>>(dirs: &[P]) -> PluginRegistry {
    let mut registry = PluginRegistry::new();
    registry.scan_dirs(dirs);
    registry
}

impl PluginRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&PluginDescriptor> {
        self.descriptors.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.descriptors.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    /// Descriptors in ascending name order.
    pub fn descriptors(&self) -> impl Iterator<Item = &PluginDescriptor> {
        self.descriptors.values()
    }

    /// Names of the live descriptors providing `key`, ascending.
    pub fn providers_of(&self, key: &str) -> impl Iterator<Item = &str> {
        self.providers
            .get(key)
            .into_iter()
            .flat_map(|names| names.iter().map(String::as_str))
    }

    pub fn in_category<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a PluginDescriptor> {
        self.descriptors.values().filter(move |d| d.has_category(label))
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Manifests that failed to parse. Scanning continues past them.
    pub fn errors(&self) -> &[ManifestParseError] {
        &self.errors
    }

    pub fn scan_dirs<P: AsRef<Path>>(&mut self, dirs: &[P]) {
        for dir in dirs {
            self.scan_dir(dir.as_ref());
        }
    }

    fn scan_dir(&mut self, dir: &Path) {
        self.sources.push(Source::Directory(dir.to_path_buf()));
        let entries = match fs::read_dir(dir) {
            Ok(entries) => entries,
            Err(e) => {
                self.warnings
                    .push(format!("skipping plugin directory {}: {e}", dir.display()));
                return;
            }
        };
        let mut files: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "plugin"))
            .collect();
        files.sort();

        for file in files {
            let text = match fs::read_to_string(&file) {
                Ok(text) => text,
                Err(e) => {
                    self.errors.push(ManifestParseError {
                        file: file.clone(),
                        line: 0,
                        reason: format!("unreadable: {e}"),
                    });
                    continue;
                }
            };
            match parse_manifest(&text, &file) {
                Ok(descriptor) => self.insert_manifest(descriptor),
                Err(e) => self.errors.push(e),
            }
        }
    }

    fn insert_manifest(&mut self, descriptor: PluginDescriptor) {
        if let Some(live) = self.descriptors.get(&descriptor.name) {
            self.warnings.push(format!(
                "plugin {:?} from {} shadowed by {}",
                descriptor.name,
                describe(&descriptor.origin),
                describe(&live.origin),
            ));
            return;
        }
        self.insert(descriptor);
    }

    /// Registers a statically linked plugin. Static descriptors take
    /// precedence over any manifest of the same name.
    pub fn register_static(&mut self, mut descriptor: PluginDescriptor) -> Result<(), KernelError> {
        descriptor.validate()?;
        descriptor.origin = Origin::Static;
        if !self.sources.contains(&Source::Static) {
            self.sources.push(Source::Static);
        }
        if let Some(live) = self.descriptors.get(&descriptor.name) {
            if live.origin == Origin::Static {
                return Err(KernelError::DuplicateStatic(descriptor.name));
            }
            self.warnings.push(format!(
                "plugin {:?} from {} shadowed by static registration",
                descriptor.name,
                describe(&live.origin),
            ));
            let name = descriptor.name.clone();
            self.remove(&name);
        }
        self.insert(descriptor);
        Ok(())
    }

    fn insert(&mut self, descriptor: PluginDescriptor) {
        for key in &descriptor.provides {
            self.providers
                .entry(key.clone())
                .or_default()
                .insert(descriptor.name.clone());
        }
        self.descriptors.insert(descriptor.name.clone(), descriptor);
    }

    fn remove(&mut self, name: &str) {
        if let Some(old) = self.descriptors.remove(name) {
            for key in &old.provides {
                if let Some(names) = self.providers.get_mut(key) {
                    names.remove(name);
                    if names.is_empty() {
                        self.providers.remove(key);
                    }
                }
            }
        }
    }
}

fn describe(origin: &Origin) -> String {
    match origin {
        Origin::Static => "static registration".into(),
        Origin::Manifest(path) => path.display().to_string(),
    }
}
