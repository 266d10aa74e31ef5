use std::collections::BTreeMap;

use super::{ConfigValue, ResourceFile, Section};
use crate::geom::Viewpoint;
use crate::hub::{set_twig_visibility, MessageBus, TwigTree, ViewClass};
use crate::kernel::KernelError;
use crate::scene::{Axis, Plane};

/// What a `[plugins]` section asks for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PluginLoad {
    pub names: Vec<String>,
    pub categories: Vec<String>,
}

type Loader<'a> = dyn FnMut(&PluginLoad) -> Result<Vec<String>, KernelError> + 'a;

/// Everything a resource file can change.
pub struct ApplyTarget<'a> {
    pub bus: &'a mut MessageBus,
    pub config: &'a mut super::ConfigService,
    pub twigs: &'a mut TwigTree,
    pub viewpoints: &'a mut BTreeMap<String, Viewpoint>,
    /// Loads plugins and returns the names attached.
    pub plugins: Option<&'a mut Loader<'a>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ApplyReport {
    pub applied: Vec<String>,
    pub warnings: Vec<String>,
}

const TWIG_KEYS: [(&str, ViewClass, bool); 6] = [
    ("visible3d", ViewClass::ThreeD, false),
    ("visible2d", ViewClass::TwoD, false),
    ("visibletext", ViewClass::Text, false),
    ("descendants3d", ViewClass::ThreeD, true),
    ("descendants2d", ViewClass::TwoD, true),
    ("descendantstext", ViewClass::Text, true),
];

/// Plugins are loaded first; the other sections follow in file order.
/// Problems other than plugin load failures become warnings.
pub fn apply_resource(rf: &ResourceFile, target: &mut ApplyTarget<'_>) -> Result<ApplyReport, KernelError> {
    let mut report = ApplyReport {
        applied: Vec::new(),
        warnings: rf.warnings.clone(),
    };
    for section in rf.sections_of("plugins") {
        apply_plugins(section, target, &mut report)?;
    }
    for section in &rf.sections {
        match section.kind.as_str() {
            "plugins" => {}
            "twig" => apply_twig(section, target, &mut report),
            "cuts" => apply_values(section, target, &mut report, true),
            "config" => apply_values(section, target, &mut report, false),
            "viewpoint" => apply_viewpoint(section, target, &mut report),
            other => report.warnings.push(format!("unknown section [{other}]")),
        }
    }
    Ok(report)
}

fn apply_plugins(section: &Section, target: &mut ApplyTarget<'_>, report: &mut ApplyReport) -> Result<(), KernelError> {
    let mut load = PluginLoad::default();
    for (key, _) in &section.entries {
        match key.as_str() {
            "load" => load.names = section.list(key),
            "categories" => load.categories = section.list(key),
            other => report.warnings.push(format!("[plugins]: unknown key {other:?}")),
        }
    }
    if load == PluginLoad::default() {
        return Ok(());
    }
    match target.plugins.as_mut() {
        Some(loader) => {
            for name in loader(&load)? {
                report.applied.push(format!("plugin {name}"));
            }
        }
        None => report.warnings.push("[plugins]: no plugin loader available".into()),
    }
    Ok(())
}

fn apply_twig(section: &Section, target: &mut ApplyTarget<'_>, report: &mut ApplyReport) {
    let Some(path) = section.qualifier.as_deref() else {
        report.warnings.push("[twig] needs a path qualifier".into());
        return;
    };
    let Ok(twig) = target.twigs.get(path) else {
        report.warnings.push(format!("UnknownTwigPath: {path}"));
        return;
    };
    let mut flags: BTreeMap<ViewClass, _> = ViewClass::ALL.iter().map(|&v| (v, twig.flags(v))).collect();
    let mut touched = Vec::new();
    for (key, value) in &section.entries {
        let Some(&(_, view, descendants)) = TWIG_KEYS.iter().find(|(k, _, _)| k == key) else {
            report.warnings.push(format!("[twig:{path}]: unknown key {key:?}"));
            continue;
        };
        let on = match value.as_str() {
            "true" => true,
            "false" => false,
            _ => {
                report.warnings.push(format!("[twig:{path}]: {key} must be true or false"));
                continue;
            }
        };
        let f = flags.get_mut(&view).expect("all views present");
        if descendants {
            f.descendants_visible = on;
        } else {
            f.self_visible = on;
        }
        if !touched.contains(&view) {
            touched.push(view);
        }
    }
    for view in touched {
        let f = flags[&view];
        match set_twig_visibility(target.twigs, target.bus, path, view, f.self_visible, f.descendants_visible) {
            Ok(_) => report.applied.push(format!(
                "twig {path} {view} self={} descendants={}",
                f.self_visible, f.descendants_visible
            )),
            Err(e) => report.warnings.push(e.to_string()),
        }
    }
}

fn apply_values(section: &Section, target: &mut ApplyTarget<'_>, report: &mut ApplyReport, numeric: bool) {
    for (key, text) in &section.entries {
        let result = if numeric {
            match ConfigValue::parse_as(super::ValueKind::Number, text) {
                Some(v) => target.config.set(target.bus, key, v),
                None => {
                    report.warnings.push(format!("[cuts]: {key} = {text:?} is not a finite number"));
                    continue;
                }
            }
        } else {
            target.config.set_text(target.bus, key, text)
        };
        match result {
            Ok(_) => report.applied.push(format!("{} {key} = {text}", section.kind)),
            Err(e) => report.warnings.push(e.to_string()),
        }
    }
}

fn apply_viewpoint(section: &Section, target: &mut ApplyTarget<'_>, report: &mut ApplyReport) {
    let Some(name) = section.qualifier.as_deref() else {
        report.warnings.push("[viewpoint] needs a name qualifier".into());
        return;
    };
    let mut vp = Viewpoint { axis: Axis::Z, slice: None };
    for (key, value) in &section.entries {
        match key.as_str() {
            "axis" => match value.parse::<Axis>() {
                Ok(axis) => vp.axis = axis,
                Err(e) => {
                    report.warnings.push(format!("[viewpoint:{name}]: {e}"));
                    return;
                }
            },
            "slice" if value == "none" || value.is_empty() => vp.slice = None,
            "slice" => match Plane::parse(value) {
                Ok(plane) => vp.slice = Some(plane),
                Err(e) => {
                    report.warnings.push(format!("[viewpoint:{name}]: {e}"));
                    return;
                }
            },
            other => report.warnings.push(format!("[viewpoint:{name}]: unknown key {other:?}")),
        }
    }
    target.viewpoints.insert(name.to_string(), vp);
    report.applied.push(format!("viewpoint {name}"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_resource, ConfigService};
    use crate::repkit::ReprId;

    struct World {
        bus: MessageBus,
        config: ConfigService,
        twigs: TwigTree,
        viewpoints: BTreeMap<String, Viewpoint>,
    }

    fn world() -> World {
        let mut twigs = TwigTree::new();
        let e = twigs.add("/", "Event", None).unwrap();
        twigs.add(&e, "Tracks", Some(ReprId(1))).unwrap();
        World {
            bus: MessageBus::new(),
            config: ConfigService::new(),
            twigs,
            viewpoints: BTreeMap::new(),
        }
    }

    fn run<'l>(w: &'l mut World, text: &str, loader: Option<&'l mut Loader<'l>>) -> ApplyReport {
        let rf = parse_resource(text).unwrap();
        let mut target = ApplyTarget {
            bus: &mut w.bus,
            config: &mut w.config,
            twigs: &mut w.twigs,
            viewpoints: &mut w.viewpoints,
            plugins: loader,
        };
        apply_resource(&rf, &mut target).unwrap()
    }

    #[test]
    fn full_file() {
        let mut w = world();
        let mut requested = Vec::new();
        let mut loader = |load: &PluginLoad| {
            requested.push(load.clone());
            Ok(load.names.clone())
        };
        let report = run(
            &mut w,
            "[plugins]\nload = A, B\n[twig:/Event]\ndescendants3d = false\n[cuts]\nminEnergyGeV = 1.5\n[viewpoint:SliceY]\naxis = Y\nslice = 0,1,0,0\n[twig:/nope]\nvisible3d = false\n[mystery]\n",
            Some(&mut loader),
        );
        assert_eq!(requested[0].names, ["A", "B"]);
        assert!(!w.twigs.effective_visibility("/Event/Tracks", ViewClass::ThreeD).unwrap());
        assert!(w.twigs.effective_visibility("/Event/Tracks", ViewClass::TwoD).unwrap());
        assert_eq!(w.config.number("minEnergyGeV"), Some(1.5));
        assert_eq!(w.viewpoints["SliceY"].axis, Axis::Y);
        assert!(w.viewpoints["SliceY"].slice.is_some());
        assert_eq!(report.warnings.len(), 2, "{:?}", report.warnings);
        assert!(report.warnings[0].contains("/nope"));
    }

    #[test]
    fn plugins_only() {
        let mut w = world();
        let before = w.twigs.clone();
        let mut loader = |load: &PluginLoad| Ok(load.names.clone());
        let report = run(&mut w, "[plugins]\nload = A\n", Some(&mut loader));
        assert_eq!(report.applied, ["plugin A"]);
        assert_eq!(w.twigs, before);
        assert_eq!(w.config.entries().count(), 0);
    }

    #[test]
    fn load_errors_propagate() {
        let mut w = world();
        let rf = parse_resource("[plugins]\nload = Missing\n").unwrap();
        let mut loader = |_: &PluginLoad| Err(KernelError::UnknownPlugin("Missing".into()));
        let mut target = ApplyTarget {
            bus: &mut w.bus,
            config: &mut w.config,
            twigs: &mut w.twigs,
            viewpoints: &mut w.viewpoints,
            plugins: Some(&mut loader),
        };
        assert!(apply_resource(&rf, &mut target).is_err());
    }
}
