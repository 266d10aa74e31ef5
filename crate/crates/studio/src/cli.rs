//! Command-line entry point.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use evd_core::config::{apply_resource, parse_resource, plugin_path, ApplyTarget, ConfigService, PluginLoad, ResourceFile, PLUGIN_PATH_VAR};
use evd_core::hub::{MessageBus, TwigTree};
use evd_core::kernel::{run_application, Request, Session};
use evd_core::scene::{Axis, Plane};

use crate::app::{Studio, StudioError, VectorKind};
use crate::event::EventSource;
use crate::plugins;
use crate::server::Server;

#[derive(Debug, Parser)]
#[command(name = "studio", version, about = "Event display studio: headless vector export and a JSON-lines protocol server")]
pub struct Cli {
    /// Plugin directories separated by ':'. Replaces $EVD_PLUGINS.
    #[arg(long, value_name = "DIRS")]
    pub plugins: Option<String>,
    /// Resource file applied at startup.
    #[arg(long, value_name = "FILE")]
    pub resource: Option<PathBuf>,
    /// Geometry file, overriding the resource file's.
    #[arg(long, value_name = "FILE")]
    pub geometry: Option<PathBuf>,
    /// Event file (one JSON event per line), overriding the resource file's.
    #[arg(long, value_name = "FILE")]
    pub event_file: Option<PathBuf>,
    /// Number of events to read before exporting or serving.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub events: usize,
    /// Projection axis for export: X, Y or Z.
    #[arg(long, value_parser = parse_axis)]
    pub view: Option<Axis>,
    /// Slice plane "nx,ny,nz,d" applied to detector volumes.
    #[arg(long, value_parser = parse_plane)]
    pub slice: Option<Plane>,
    /// Write the scene as SVG, or EPS for .eps and .ps names.
    #[arg(long, value_name = "PATH")]
    pub export: Option<PathBuf>,
    /// Serve the protocol on ADDR, e.g. 127.0.0.1:7070 (port 0 picks one).
    #[arg(long, value_name = "ADDR")]
    pub serve: Option<String>,
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse()
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    Plane::parse(s).map_err(|e| e.to_string())
}

/// Runs the program with `args` (program name first) and returns the exit
/// status.
pub fn main_entry(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let dirs = match &cli.plugins {
        Some(p) => plugin_path(p),
        None => std::env::var(PLUGIN_PATH_VAR).map(|v| plugin_path(&v)).unwrap_or_default(),
    };
    let registry = plugins::registry(&dirs);
    for w in registry.warnings() {
        eprintln!("studio: warning: {w}");
    }
    for e in registry.errors() {
        eprintln!("studio: warning: {e}");
    }
    match run_application(registry, plugins::factories(), plugins::PERSONALITY, &args, Studio::new()) {
        Ok(outcome) => outcome.status,
        Err(e) => {
            eprintln!("studio: {e}");
            1
        }
    }
}

/// The personality's control loop.
pub fn run_personality(session: &mut Session<Studio>, args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(session, &cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("studio: {e}");
            1
        }
    }
}

/// Loads the plugins a resource file asks for.
fn load_resource_plugins(session: &mut Session<Studio>, rf: &ResourceFile) -> Result<Vec<String>, StudioError> {
    let plugins_only = ResourceFile {
        sections: rf.sections.iter().filter(|s| s.kind == "plugins").cloned().collect(),
        warnings: Vec::new(),
    };
    // the other targets are unused by [plugins] sections
    let (mut bus, mut config, mut twigs, mut viewpoints) =
        (MessageBus::new(), ConfigService::new(), TwigTree::new(), BTreeMap::new());
    let mut loader = |load: &PluginLoad| {
        let requests: Vec<Request> = load
            .names
            .iter()
            .map(Request::name)
            .chain(load.categories.iter().map(Request::category))
            .collect();
        session.load(&requests)
    };
    let report = apply_resource(
        &plugins_only,
        &mut ApplyTarget {
            bus: &mut bus,
            config: &mut config,
            twigs: &mut twigs,
            viewpoints: &mut viewpoints,
            plugins: Some(&mut loader),
        },
    )?;
    Ok(report.warnings)
}

pub fn run(session: &mut Session<Studio>, cli: &Cli) -> Result<(), StudioError> {
    if let Some(path) = &cli.resource {
        let text = std::fs::read_to_string(path).map_err(|e| StudioError::Io(format!("{}: {e}", path.display())))?;
        let rf = parse_resource(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut warnings = load_resource_plugins(session, &rf)?;
        warnings.extend(session.context.apply_settings(&rf, base)?.warnings);
        for w in warnings {
            eprintln!("studio: warning: {w}");
        }
    }
    let studio = &mut session.context;
    if let Some(path) = &cli.geometry {
        studio.load_geometry_file(path)?;
    }
    if let Some(path) = &cli.event_file {
        studio.set_source(Some(EventSource::open(path)?));
    }
    for _ in 0..cli.events {
        studio.next_event()?;
    }
    if let Some(path) = &cli.export {
        let axis = cli.view.unwrap_or(studio.view.axis);
        let slice = cli.slice.or(studio.view.slice);
        let out = studio.export(VectorKind::from_path(path), axis, slice.as_ref())?;
        std::fs::write(path, &out.bytes).map_err(|e| StudioError::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(addr) = &cli.serve {
        let server = Server::bind(addr)?;
        println!("listening on {}", server.local_addr());
        let _ = std::io::stdout().flush();
        server.run(studio)?;
    }
    Ok(())
}
