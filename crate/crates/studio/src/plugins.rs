//! Statically linked plugins and the factory table for manifest plugins.

use std::path::PathBuf;

use evd_core::kernel::{AttachError, Extension, Factories, Personality, PluginDescriptor, PluginRegistry, Session, PERSONALITY_CATEGORY};
use evd_core::repkit::{MethodRegistry, RepError};

use crate::app::Studio;
use crate::reps;

pub const PERSONALITY: &str = "studio-cli";
pub const REPS_CATEGORY: &str = "reps";

type Register = fn(&mut MethodRegistry) -> Result<(), RepError>;

/// Registers a set of rep handlers, and optionally a model for them.
struct RepsPlugin {
    register: Register,
    model: Option<&'static str>,
}

impl Extension<Studio> for RepsPlugin {
    fn attach(&mut self, session: &mut Session<Studio>) -> Result<(), AttachError> {
        if let Some(kind) = self.model {
            session.context.ensure_model(kind);
        }
        let mut kit = session.context.kit.borrow_mut();
        (self.register)(kit.methods_mut()?)?;
        Ok(())
    }
}

struct StudioCli;

impl Extension<Studio> for StudioCli {
    fn attach(&mut self, _session: &mut Session<Studio>) -> Result<(), AttachError> {
        Ok(())
    }
}

impl Personality<Studio> for StudioCli {
    fn categories(&self) -> Vec<String> {
        vec![REPS_CATEGORY.into()]
    }

    fn run(&mut self, session: &mut Session<Studio>, args: &[String]) -> i32 {
        crate::cli::run_personality(session, args)
    }
}

pub fn static_descriptors() -> Vec<PluginDescriptor> {
    vec![
        PluginDescriptor::new(PERSONALITY, "studio-cli").category(PERSONALITY_CATEGORY),
        PluginDescriptor::new("event-reps", "event-reps")
            .category(REPS_CATEGORY)
            .provides("reps.event"),
        PluginDescriptor::new("geometry-reps", "geometry-reps")
            .category(REPS_CATEGORY)
            .provides("reps.geometry"),
        PluginDescriptor::new("text-fallback", "text-fallback")
            .category(REPS_CATEGORY)
            .provides("reps.text-fallback"),
    ]
}

/// Static plugins first, then manifests found in `dirs`.
pub fn registry(dirs: &[PathBuf]) -> PluginRegistry {
    let mut r = PluginRegistry::new();
    for d in static_descriptors() {
        r.register_static(d).expect("static descriptors are valid");
    }
    r.scan_dirs(dirs);
    r
}

pub fn factories() -> Factories<Studio> {
    let mut f = Factories::new();
    f.personality("studio-cli", || Box::new(StudioCli));
    let reps: [(&str, Register, Option<&'static str>); 4] = [
        ("event-reps", reps::register_event_reps, None),
        ("geometry-reps", reps::register_geometry_reps, None),
        ("text-fallback", reps::register_text_fallback, None),
        ("etaphi", reps::register_etaphi_reps, Some(reps::MODEL_LEGO)),
    ];
    for (entry, register, model) in reps {
        f.extension(entry, move || Box::new(RepsPlugin { register, model }));
    }
    f
}
