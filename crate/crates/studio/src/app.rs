//! The studio context: objects, browsers, twigs and configuration, all owned
//! by the control loop.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread::{self, ThreadId};

use evd_core::config::{apply_resource, ApplyReport, ApplyTarget, ConfigError, ConfigService, ResourceFile};
use evd_core::geom::{parse_geometry, GeomError, TraversalMode, Usage, UsageDirection, Viewpoint, VolumeTree};
use evd_core::hub::{
    attach_browser, set_twig_visibility, Browser, BrowserKind, HubError, MessageBus, Payload, SelectionEvent,
    SelectionMode, SiteKind, SiteTree, TwigTree, ViewClass, CONFIG_TOPIC, SELECTION_TOPIC, VISIBILITY_TOPIC,
};
use evd_core::kernel::KernelError;
use evd_core::repkit::{ModelId, Payload as ObjectPayload, RepContent, RepError, RepKit, ReprId, Representable, TextBody};
use evd_core::scene::polygon::P2;
use evd_core::scene::{pick_2d, project_primitives, slice_per_object, Axis, Plane, Prim2D, Primitive, SceneError, SceneGraph};
use evd_core::vgout::{depth_sort, write_eps, write_svg, CullStats, DocOptions, VectorDoc, VgError, Viewport};
use serde_json::{json, Value};
use thiserror::Error;

use crate::event::{Deposit, EventError, EventRecord, EventSource};
use crate::protocol::Notice;
use crate::reps::{
    DepositData, TrackData, VolumeData, DEPOSITS_KIND, MODEL_3D, MODEL_TEXT, TRACK_KIND, VOLUME_KIND,
};

pub const EVENT_TWIG: &str = "/Event";
pub const TRACKS_TWIG: &str = "/Event/Tracks";
pub const DEPOSITS_TWIG: &str = "/Event/Deposits";
pub const DETECTOR_TWIG: &str = "/Detector";

/// Tracks below this energy are hidden.
pub const MIN_ENERGY_CUT: &str = "minEnergyGeV";
/// Viewpoint adopted from a resource file when present.
pub const DEFAULT_VIEWPOINT: &str = "Default";
pub const EXPORT_MARGIN_MM: f64 = 10.0;

#[derive(Debug, Error)]
pub enum StudioError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Hub(#[from] HubError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Vector(#[from] VgError),
    #[error("no event source is open")]
    NoEventSource,
    #[error("no geometry is loaded")]
    NoGeometry,
    #[error("object {0} has no text rep")]
    NoTextRep(ReprId),
    #[error("no model of kind {0:?}")]
    UnknownModel(String),
    #[error("unknown selector {0:?}")]
    UnknownSelector(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Svg,
    Eps,
}

impl VectorKind {
    /// EPS for `.eps` and `.ps`, SVG otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("eps") | Some("ps") => VectorKind::Eps,
            _ => VectorKind::Svg,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VectorKind::Svg => "svg",
            VectorKind::Eps => "eps",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Export {
    pub bytes: Vec<u8>,
    pub stats: CullStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedEvent {
    pub id: u64,
    pub tracks: Vec<ReprId>,
    pub deposits: Vec<ReprId>,
}

static OFF_THREAD_WRITES: AtomicUsize = AtomicUsize::new(0);

/// Mutations of any studio made from a thread other than its creator.
pub fn single_writer_violations() -> usize {
    OFF_THREAD_WRITES.load(Ordering::SeqCst)
}

pub struct Studio {
    pub kit: Rc<RefCell<RepKit>>,
    pub bus: MessageBus,
    pub twigs: TwigTree,
    pub config: ConfigService,
    pub viewpoints: BTreeMap<String, Viewpoint>,
    pub sites: SiteTree,
    pub model_3d: ModelId,
    pub model_text: ModelId,
    /// Every model by kind, including those added by plugins.
    models: BTreeMap<String, ModelId>,
    pub view3d: Rc<RefCell<Browser>>,
    pub twig_browser: Rc<RefCell<Browser>>,
    pub text: Rc<RefCell<Browser>>,
    /// Projection used for scene updates.
    pub view: Viewpoint,
    geometry: Option<VolumeTree>,
    volumes: BTreeMap<String, ReprId>,
    source: Option<EventSource>,
    event: Option<LoadedEvent>,
    energies: BTreeMap<ReprId, f64>,
    notices: Rc<RefCell<Vec<Notice>>>,
    scene_dirty: bool,
    owner: ThreadId,
}

impl Default for Studio {
    fn default() -> Self {
        Self::new()
    }
}

fn ids_json(ids: &BTreeSet<ReprId>) -> Value {
    json!(ids.iter().map(|i| i.0).collect::<Vec<_>>())
}

fn twig_name(text: &str) -> String {
    let name = text.replace('/', "_");
    if name.is_empty() {
        "unnamed".into()
    } else {
        name
    }
}

impl Studio {
    pub fn new() -> Self {
        let mut kit = RepKit::new();
        let model_3d = kit.add_model(MODEL_3D);
        let model_text = kit.add_model(MODEL_TEXT);
        let kit = Rc::new(RefCell::new(kit));

        let mut sites = SiteTree::new();
        let b3 = sites.add_browser(BrowserKind::View3d, Some(model_3d));
        let bt = sites.add_browser(BrowserKind::Twig, None);
        let bx = sites.add_browser(BrowserKind::Text, Some(model_text));
        let window = sites.compose_site(None, SiteKind::Window, None).expect("static layout");
        let split = sites
            .compose_site(Some(window), SiteKind::SplitHorizontal, None)
            .expect("static layout");
        for b in [b3, bt, bx] {
            sites.compose_site(Some(split), SiteKind::Tab, Some(b)).expect("static layout");
        }

        let mut bus = MessageBus::new();
        let view3d = Rc::new(RefCell::new(Browser::new(b3, BrowserKind::View3d, Some(model_3d))));
        let twig_browser = Rc::new(RefCell::new(Browser::new(bt, BrowserKind::Twig, None)));
        let text = Rc::new(RefCell::new(Browser::new(bx, BrowserKind::Text, Some(model_text))));
        for b in [&view3d, &twig_browser, &text] {
            attach_browser(&mut bus, b.clone(), kit.clone());
        }

        let notices: Rc<RefCell<Vec<Notice>>> = Rc::default();
        let n = notices.clone();
        bus.subscribe(SELECTION_TOPIC, "notices", move |m, _| {
            if let Payload::Selection { source, ids } = &m.payload {
                let payload = json!({ "ids": ids_json(ids), "source": source.map(|s| s.0) });
                n.borrow_mut().push(Notice::event("selection", payload));
            }
            Ok(())
        });
        let n = notices.clone();
        bus.subscribe(VISIBILITY_TOPIC, "notices", move |m, _| {
            if let Payload::Visibility {
                path,
                view,
                self_visible,
                descendants_visible,
            } = &m.payload
            {
                let payload = json!({
                    "path": path,
                    "viewClass": view.name(),
                    "self": self_visible,
                    "descendants": descendants_visible,
                });
                n.borrow_mut().push(Notice::event("twigUpdate", payload));
            }
            Ok(())
        });
        let n = notices.clone();
        bus.subscribe(CONFIG_TOPIC, "notices", move |m, _| {
            if let Payload::Config { key, value } = &m.payload {
                n.borrow_mut()
                    .push(Notice::event("configChanged", json!({ "key": key, "value": value })));
            }
            Ok(())
        });

        let mut twigs = TwigTree::new();
        twigs.add("/", "Event", None).expect("fresh tree");
        twigs.add(EVENT_TWIG, "Tracks", None).expect("fresh tree");
        twigs.add(EVENT_TWIG, "Deposits", None).expect("fresh tree");
        twigs.add("/", "Detector", None).expect("fresh tree");

        Self {
            kit,
            bus,
            twigs,
            config: ConfigService::new(),
            viewpoints: BTreeMap::new(),
            sites,
            model_3d,
            model_text,
            models: BTreeMap::from([(MODEL_3D.to_string(), model_3d), (MODEL_TEXT.to_string(), model_text)]),
            view3d,
            twig_browser,
            text,
            view: Viewpoint { axis: Axis::Z, slice: None },
            geometry: None,
            volumes: BTreeMap::new(),
            source: None,
            event: None,
            energies: BTreeMap::new(),
            notices,
            scene_dirty: false,
            owner: thread::current().id(),
        }
    }

    fn writer(&self) {
        if thread::current().id() != self.owner {
            OFF_THREAD_WRITES.fetch_add(1, Ordering::SeqCst);
            debug_assert!(false, "studio state changed off its control thread");
        }
    }

    pub fn geometry(&self) -> Option<&VolumeTree> {
        self.geometry.as_ref()
    }

    pub fn event(&self) -> Option<&LoadedEvent> {
        self.event.as_ref()
    }

    pub fn volume_id(&self, path: &str) -> Option<ReprId> {
        self.volumes.get(path).copied()
    }

    pub fn model(&self, kind: &str) -> Option<ModelId> {
        self.models.get(kind).copied()
    }

    /// The model of `kind`, created on first use.
    pub fn ensure_model(&mut self, kind: &str) -> ModelId {
        self.writer();
        if let Some(m) = self.model(kind) {
            return m;
        }
        let m = self.kit.borrow_mut().add_model(kind);
        self.models.insert(kind.to_string(), m);
        m
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    pub fn set_source(&mut self, source: Option<EventSource>) {
        self.writer();
        self.source = source;
    }

    pub fn take_source(&mut self) -> Option<EventSource> {
        self.writer();
        self.source.take()
    }

    /// Notices produced since the last call, oldest first.
    pub fn drain_notices(&self) -> Vec<Notice> {
        std::mem::take(&mut *self.notices.borrow_mut())
    }

    /// Whether the drawn scene may have changed since the last call.
    pub fn take_scene_dirty(&mut self) -> bool {
        std::mem::take(&mut self.scene_dirty)
    }

    /// Drops reps whose objects are gone.
    fn prune_reps(&mut self) -> Result<(), StudioError> {
        let mut kit = self.kit.borrow_mut();
        let live: BTreeSet<ReprId> = kit.objects().map(|o| o.id()).collect();
        for &m in self.models.values() {
            kit.model_mut(m)?.retain_objects(|id| live.contains(&id));
        }
        Ok(())
    }

    /// Drops selected ids that no longer exist.
    fn prune_selection(&mut self, removed: &BTreeSet<ReprId>) -> Result<(), StudioError> {
        let current = self.bus.selection().clone();
        if current.is_disjoint(removed) {
            return Ok(());
        }
        let keep: Vec<ReprId> = current.difference(removed).copied().collect();
        self.bus.select(SelectionEvent::new(None, keep, SelectionMode::Replace))?;
        Ok(())
    }

    /// Replaces the detector. Every physical volume becomes an object,
    /// mirrored under `/Detector` by its path.
    pub fn load_geometry(&mut self, tree: VolumeTree) -> Result<usize, StudioError> {
        self.writer();
        let nodes = tree.traverse(TraversalMode::Physical)?;
        let removed: BTreeSet<ReprId> = std::mem::take(&mut self.volumes).into_values().collect();
        {
            let mut kit = self.kit.borrow_mut();
            for id in &removed {
                kit.remove_object(*id);
            }
        }
        self.twigs.clear_children(DETECTOR_TWIG)?;
        self.prune_reps()?;
        self.prune_selection(&removed)?;

        for node in &nodes {
            let info = tree.volume_info(&node.path)?;
            let solid = tree.logical(&node.logical)?.solid.clone();
            let key = node.path.to_string();
            let twig_path = format!("{DETECTOR_TWIG}{key}");
            let (parent, name) = twig_path.rsplit_once('/').expect("path has a slash");
            let id = {
                let mut kit = self.kit.borrow_mut();
                let id = kit.allocate_id();
                let data = VolumeData {
                    path: node.path.clone(),
                    info,
                    solid,
                };
                kit.add_object(Representable::new(id, [VOLUME_KIND], data)?)?;
                id
            };
            self.twigs.add(parent, name, Some(id))?;
            self.volumes.insert(key, id);
        }
        self.geometry = Some(tree);
        self.scene_dirty = true;
        Ok(nodes.len())
    }

    pub fn load_geometry_file(&mut self, path: &Path) -> Result<usize, StudioError> {
        let text = std::fs::read_to_string(path).map_err(|e| StudioError::Io(format!("{}: {e}", path.display())))?;
        self.load_geometry(parse_geometry(&text)?)
    }

    fn clear_event(&mut self) -> Result<(), StudioError> {
        let Some(event) = self.event.take() else {
            return Ok(());
        };
        let removed: BTreeSet<ReprId> = event.tracks.iter().chain(&event.deposits).copied().collect();
        {
            let mut kit = self.kit.borrow_mut();
            for id in &removed {
                kit.remove_object(*id);
                self.energies.remove(id);
            }
        }
        self.twigs.clear_children(TRACKS_TWIG)?;
        self.twigs.clear_children(DEPOSITS_TWIG)?;
        self.prune_reps()?;
        self.prune_selection(&removed)
    }

    /// Replaces the current event with `record`. Payloads stay behind
    /// proxies until a rep needs them.
    pub fn materialize(&mut self, record: EventRecord) -> Result<u64, StudioError> {
        self.writer();
        self.clear_event()?;
        let event_id = record.id;
        let mut loaded = LoadedEvent {
            id: event_id,
            tracks: Vec::new(),
            deposits: Vec::new(),
        };

        for (index, track) in record.tracks.into_iter().enumerate() {
            let name = twig_name(&format!("{index}:{}", track.particle));
            let energy = track.energy_gev;
            let mut slot = Some(TrackData {
                event: event_id,
                index,
                track,
            });
            let id = {
                let mut kit = self.kit.borrow_mut();
                let id = kit.allocate_id();
                let proxy = Representable::proxy(id, [TRACK_KIND], move || {
                    slot.take()
                        .map(|d| Box::new(d) as ObjectPayload)
                        .ok_or_else(|| "track payload already taken".to_string())
                })?;
                kit.add_object(proxy)?;
                id
            };
            self.twigs.add(TRACKS_TWIG, &name, Some(id))?;
            self.energies.insert(id, energy);
            loaded.tracks.push(id);
        }

        let mut groups: BTreeMap<String, Vec<Deposit>> = BTreeMap::new();
        for d in record.deposits {
            groups.entry(d.group.clone()).or_default().push(d);
        }
        for (group, deposits) in groups {
            let name = twig_name(&group);
            let mut slot = Some(DepositData {
                event: event_id,
                group,
                deposits,
            });
            let id = {
                let mut kit = self.kit.borrow_mut();
                let id = kit.allocate_id();
                let proxy = Representable::proxy(id, [DEPOSITS_KIND], move || {
                    slot.take()
                        .map(|d| Box::new(d) as ObjectPayload)
                        .ok_or_else(|| "deposit payload already taken".to_string())
                })?;
                kit.add_object(proxy)?;
                id
            };
            self.twigs.add(DEPOSITS_TWIG, &name, Some(id))?;
            loaded.deposits.push(id);
        }

        self.event = Some(loaded);
        self.scene_dirty = true;
        self.notices
            .borrow_mut()
            .push(Notice::event("twigUpdate", json!({ "path": EVENT_TWIG, "event": event_id })));
        Ok(event_id)
    }

    /// Reads and materializes the next event from the open source.
    pub fn next_event(&mut self) -> Result<u64, StudioError> {
        self.writer();
        let record = self.source.as_mut().ok_or(StudioError::NoEventSource)?.next_event()?;
        self.materialize(record)
    }

    fn passes_cuts(&self, id: ReprId) -> bool {
        match self.energies.get(&id) {
            Some(&e) => self.config.cuts().passes_min(MIN_ENERGY_CUT, e),
            None => true,
        }
    }

    /// Visible objects for `view` after cuts, in id order.
    pub fn visible_objects(&self, view: ViewClass) -> Vec<ReprId> {
        self.twigs
            .visible_set(view)
            .into_iter()
            .filter(|&id| self.passes_cuts(id))
            .collect()
    }

    pub fn visible_tracks(&self) -> Vec<ReprId> {
        self.visible_objects(ViewClass::ThreeD)
            .into_iter()
            .filter(|id| self.energies.contains_key(id))
            .collect()
    }

    /// 3D primitives of every visible object, numbered in order.
    pub fn scene_primitives(&self) -> Result<Vec<Primitive>, StudioError> {
        let ids = self.visible_objects(ViewClass::ThreeD);
        let mut kit = self.kit.borrow_mut();
        let mut out = Vec::new();
        for id in ids {
            let rep = kit.make_rep(id, self.model_3d)?;
            kit.expand_rep(self.model_3d, rep)?;
            if let RepContent::Primitives(prims) = &kit.rep(self.model_3d, rep)?.content {
                out.extend(prims.iter().cloned());
            }
        }
        for (i, p) in out.iter_mut().enumerate() {
            p.prim_id = i as u32;
        }
        Ok(out)
    }

    /// The visible scene projected along `axis`. A slice plane cuts the
    /// detector volumes only.
    pub fn projected(&self, axis: Axis, slice: Option<&Plane>) -> Result<Vec<Prim2D>, StudioError> {
        let prims = self.scene_primitives()?;
        let prims = match slice {
            None => prims,
            Some(plane) => {
                let volumes: Vec<ReprId> = self.volumes.values().copied().collect();
                slice_per_object(&SceneGraph::from_primitives(prims), &volumes, plane).scene.flatten()
            }
        };
        Ok(project_primitives(&prims, axis))
    }

    pub fn export(&self, kind: VectorKind, axis: Axis, slice: Option<&Plane>) -> Result<Export, StudioError> {
        let prims = self.projected(axis, slice)?;
        let doc = VectorDoc::build(&prims, Viewport::fit(&prims, EXPORT_MARGIN_MM), DocOptions::default());
        let mut bytes = Vec::new();
        match kind {
            VectorKind::Svg => write_svg(&doc, &mut bytes)?,
            VectorKind::Eps => write_eps(&doc, &mut bytes)?,
        }
        Ok(Export {
            bytes,
            stats: doc.stats,
        })
    }

    /// Frontmost object under `(u, v)` in the projection along `axis`.
    pub fn pick(&self, axis: Axis, u: f64, v: f64) -> Result<Option<ReprId>, StudioError> {
        Ok(pick_2d(&self.projected(axis, None)?, &P2::new(u, v)))
    }

    pub fn select(&mut self, ids: &[ReprId], mode: SelectionMode) -> Result<BTreeSet<ReprId>, StudioError> {
        self.writer();
        {
            let kit = self.kit.borrow();
            for &id in ids {
                kit.object(id)?;
            }
        }
        self.bus.select(SelectionEvent::new(None, ids.iter().copied(), mode))?;
        Ok(self.bus.selection().clone())
    }

    /// Returns whether the flags changed.
    pub fn set_visibility(
        &mut self,
        path: &str,
        view: ViewClass,
        self_visible: bool,
        descendants_visible: bool,
    ) -> Result<bool, StudioError> {
        self.writer();
        let changed =
            set_twig_visibility(&mut self.twigs, &mut self.bus, path, view, self_visible, descendants_visible)?.is_some();
        self.scene_dirty |= changed;
        Ok(changed)
    }

    /// Returns whether the value changed.
    pub fn set_config(&mut self, key: &str, text: &str) -> Result<bool, StudioError> {
        self.writer();
        let changed = self.config.set_text(&mut self.bus, key, text)?.is_some();
        self.scene_dirty |= changed;
        Ok(changed)
    }

    pub fn text_rep(&self, id: ReprId) -> Result<TextBody, StudioError> {
        self.text_rep_in(id, MODEL_TEXT)
    }

    /// Text rep of `id` in the model of kind `kind`.
    pub fn text_rep_in(&self, id: ReprId, kind: &str) -> Result<TextBody, StudioError> {
        let model = self.model(kind).ok_or_else(|| StudioError::UnknownModel(kind.to_string()))?;
        let mut kit = self.kit.borrow_mut();
        let rep = kit.make_rep(id, model)?;
        kit.expand_rep(model, rep)?;
        match &kit.rep(model, rep)?.content {
            RepContent::Text(body) => Ok(body.clone()),
            _ => Err(StudioError::NoTextRep(id)),
        }
    }

    fn twig_json(&self, path: &str) -> Value {
        let twig = self.twigs.get(path).expect("path from the tree");
        let flags: serde_json::Map<String, Value> = ViewClass::ALL
            .iter()
            .map(|&v| {
                let f = twig.flags(v);
                (v.name().to_string(), json!({ "self": f.self_visible, "descendants": f.descendants_visible }))
            })
            .collect();
        let children: Vec<Value> = twig
            .children
            .iter()
            .map(|c| self.twig_json(&if path == "/" { format!("/{c}") } else { format!("{path}/{c}") }))
            .collect();
        json!({
            "name": twig.name,
            "path": twig.path,
            "binding": twig.binding.map(|b| b.0),
            "flags": flags,
            "children": children,
        })
    }

    pub fn twig_tree_json(&self) -> Value {
        self.twig_json("/")
    }

    pub const SELECTORS: [&'static str; 4] = ["material", "sensitive", "usage", "contains"];

    /// Geometry queries. `usage` lists the physical volumes of a logical
    /// volume, `contains` the logical volumes inside one.
    pub fn run_selector(&self, kind: &str, arg: &str) -> Result<Value, StudioError> {
        let tree = self.geometry.as_ref().ok_or(StudioError::NoGeometry)?;
        let paths = match kind {
            "material" => tree.select_by_material(arg)?,
            "sensitive" => tree.select_sensitive()?,
            "usage" | "contains" => {
                let direction = if kind == "usage" {
                    UsageDirection::Reverse
                } else {
                    UsageDirection::Forward
                };
                match tree.usage_search(arg, direction)? {
                    Usage::Paths(paths) => paths,
                    Usage::Logicals(names) => return Ok(json!({ "logicals": names })),
                }
            }
            other => return Err(StudioError::UnknownSelector(other.to_string())),
        };
        let matches: Vec<Value> = paths
            .iter()
            .map(|p| {
                let key = p.to_string();
                json!({ "path": key, "id": self.volumes.get(&key).map(|i| i.0) })
            })
            .collect();
        Ok(json!({ "matches": matches }))
    }

    /// Applies everything but `[plugins]`. Geometry and event files named in
    /// `[config]` are opened first, relative to `base`.
    pub fn apply_settings(&mut self, rf: &ResourceFile, base: &Path) -> Result<ApplyReport, StudioError> {
        self.writer();
        if let Some(config) = rf.section("config", None) {
            if let Some(file) = config.get("geometry") {
                self.load_geometry_file(&base.join(file))?;
            }
            if let Some(file) = config.get("events") {
                self.source = Some(EventSource::open(&base.join(file))?);
            }
        }
        let rest = ResourceFile {
            sections: rf.sections.iter().filter(|s| s.kind != "plugins").cloned().collect(),
            warnings: rf.warnings.clone(),
        };
        let report = apply_resource(
            &rest,
            &mut ApplyTarget {
                bus: &mut self.bus,
                config: &mut self.config,
                twigs: &mut self.twigs,
                viewpoints: &mut self.viewpoints,
                plugins: None,
            },
        )?;
        if let Some(vp) = self.viewpoints.get(DEFAULT_VIEWPOINT) {
            self.view = vp.clone();
        }
        self.scene_dirty = true;
        Ok(report)
    }

    /// The scene along the current view, in paint order.
    pub fn scene_notice(&self) -> Result<Notice, StudioError> {
        let prims = self.projected(self.view.axis, self.view.slice.as_ref())?;
        let ordered = depth_sort(prims).prims;
        Ok(Notice::event(
            "sceneUpdate",
            json!({
                "event": self.event.as_ref().map(|e| e.id),
                "axis": self.view.axis.name(),
                "primitives": ordered.iter().map(prim_json).collect::<Vec<_>>(),
            }),
        ))
    }
}

pub fn prim_json(p: &Prim2D) -> Value {
    json!({
        "primId": p.prim_id,
        "pickId": p.pick_id.0,
        "kind": p.kind.name(),
        "color": p.color.hex_rgb(),
        "alpha": p.color.a,
        "opaque": p.opaque,
        "depth": p.depth_mean,
        "points": p.outline.iter().map(|q| [q.x, q.y]).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Track;

    fn studio() -> Studio {
        let s = Studio::new();
        {
            let mut kit = s.kit.borrow_mut();
            let m = kit.methods_mut().unwrap();
            crate::reps::register_event_reps(m).unwrap();
            crate::reps::register_geometry_reps(m).unwrap();
        }
        s
    }

    fn record(id: u64, energies: &[f64]) -> EventRecord {
        EventRecord {
            id,
            tracks: energies
                .iter()
                .map(|&e| Track {
                    particle: "pion".into(),
                    points: vec![[0.0, 0.0, 0.0], [e, 1.0, 2.0]],
                    energy_gev: e,
                })
                .collect(),
            deposits: Vec::new(),
        }
    }

    #[test]
    fn proxies_stay_lazy_until_drawn() {
        let mut s = studio();
        s.materialize(record(1, &[1.0, 2.0])).unwrap();
        let ids = s.event().unwrap().tracks.clone();
        assert!(ids.iter().all(|&id| !s.kit.borrow().object(id).unwrap().is_materialized()));
        assert_eq!(s.scene_primitives().unwrap().len(), 2);
        for &id in &ids {
            assert_eq!(s.kit.borrow().object(id).unwrap().materialization_count(), 1);
        }
    }

    #[test]
    fn next_event_replaces_objects() {
        let mut s = studio();
        s.materialize(record(1, &[1.0, 2.0, 3.0])).unwrap();
        s.select(&s.event().unwrap().tracks.clone(), SelectionMode::Replace).unwrap();
        s.materialize(record(2, &[4.0])).unwrap();
        assert_eq!(s.twigs.get(TRACKS_TWIG).unwrap().children.len(), 1);
        assert!(s.bus.selection().is_empty());
        assert_eq!(s.kit.borrow().objects().count(), 1);
    }

    #[test]
    fn energy_cut_hides_tracks() {
        let mut s = studio();
        s.materialize(record(1, &[0.5, 1.5, 3.0])).unwrap();
        assert_eq!(s.visible_tracks().len(), 3);
        s.set_config(MIN_ENERGY_CUT, "1.0").unwrap();
        assert_eq!(s.visible_tracks().len(), 2);
        s.set_config(MIN_ENERGY_CUT, "2.0").unwrap();
        assert_eq!(s.visible_tracks().len(), 1);
    }

    #[test]
    fn selection_and_config_become_notices() {
        let mut s = studio();
        s.materialize(record(7, &[1.0])).unwrap();
        s.drain_notices();
        let id = s.event().unwrap().tracks[0];
        s.select(&[id], SelectionMode::Replace).unwrap();
        s.set_config(MIN_ENERGY_CUT, "0.1").unwrap();
        s.set_visibility(TRACKS_TWIG, ViewClass::ThreeD, true, false).unwrap();
        let kinds: Vec<String> = s.drain_notices().into_iter().map(|n| n.kind).collect();
        assert_eq!(kinds, ["selection", "configChanged", "twigUpdate"]);
        assert!(s.visible_tracks().is_empty());
    }

    #[test]
    fn empty_scene_exports() {
        let s = studio();
        let out = s.export(VectorKind::Svg, Axis::Z, None).unwrap();
        assert!(String::from_utf8(out.bytes).unwrap().contains("<svg"));
    }
}
