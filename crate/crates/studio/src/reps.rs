//! Payload types for the studio's representables and the rep handlers the
//! static plugins register for them.

use evd_core::geom::{Solid, VolumeInfo, VolumePath};
use evd_core::repkit::{MethodRegistry, RepContent, RepError, RepKit, Represented, TextBody, ANY_KIND, EXPAND, REPRESENT};
use evd_core::scene::{eta_phi_project, EnergyDeposit, Primitive, Rgba};
use nalgebra::Point3;

use crate::event::{Deposit, Track};

pub const MODEL_3D: &str = "3d";
pub const MODEL_TEXT: &str = "text";
/// Eta-phi summaries, provided by the optional `etaphi` plugin.
pub const MODEL_LEGO: &str = "lego";

pub const TRACK_KIND: &str = "Track";
pub const DEPOSITS_KIND: &str = "DepositGroup";
pub const VOLUME_KIND: &str = "Volume";

pub const DEPOSIT_COLOR: Rgba = Rgba::new(1.0, 0.65, 0.0, 1.0);
pub const VOLUME_COLOR: Rgba = Rgba::new(0.6, 0.6, 0.6, 0.25);
pub const SILICON_COLOR: Rgba = Rgba::new(0.85, 0.75, 0.3, 0.25);

/// Track colour by particle: muons red, electrons green, pions blue, the
/// rest cyan.
pub fn track_color(particle: &str) -> Rgba {
    match particle.to_ascii_lowercase().as_str() {
        "muon" | "mu" | "mu-" | "mu+" | "antimuon" => Rgba::RED,
        "electron" | "e" | "e-" | "e+" | "positron" => Rgba::GREEN,
        "pion" | "pi" | "pi+" | "pi-" | "pi0" => Rgba::BLUE,
        _ => Rgba::CYAN,
    }
}

#[derive(Debug, Clone)]
pub struct TrackData {
    pub event: u64,
    pub index: usize,
    pub track: Track,
}

#[derive(Debug, Clone)]
pub struct DepositData {
    pub event: u64,
    pub group: String,
    pub deposits: Vec<Deposit>,
}

impl DepositData {
    pub fn total_energy(&self) -> f64 {
        self.deposits.iter().map(|d| d.energy_gev).sum()
    }
}

#[derive(Debug, Clone)]
pub struct VolumeData {
    pub path: VolumePath,
    pub info: VolumeInfo,
    pub solid: Solid,
}

fn point(p: &[f64; 3]) -> Point3<f64> {
    Point3::new(p[0], p[1], p[2])
}

fn stub() -> Result<Box<dyn std::any::Any>, RepError> {
    Ok(Box::new(Represented::Stub))
}

fn content(c: RepContent) -> Result<Box<dyn std::any::Any>, RepError> {
    Ok(Box::new(c))
}

fn register_stub(m: &mut MethodRegistry, kind: &str, model: &str) -> Result<(), RepError> {
    m.register::<(), _>(REPRESENT, kind, model, |_, _| stub())
}

/// Track and deposit-group handlers for the 3D and text models.
pub fn register_event_reps(m: &mut MethodRegistry) -> Result<(), RepError> {
    for kind in [TRACK_KIND, DEPOSITS_KIND] {
        register_stub(m, kind, MODEL_3D)?;
        register_stub(m, kind, MODEL_TEXT)?;
    }
    m.register::<(), _>(EXPAND, TRACK_KIND, MODEL_3D, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<TrackData>()?;
        let points = data.track.points.iter().map(point).collect();
        let color = track_color(&data.track.particle);
        content(RepContent::Primitives(vec![Primitive::polyline(0, call.object, points, color)]))
    })?;
    m.register::<(), _>(EXPAND, TRACK_KIND, MODEL_TEXT, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<TrackData>()?;
        let body = TextBody::new(format!("Track {} of event {}", data.index, data.event))
            .field("particle", &data.track.particle)
            .field("energyGeV", data.track.energy_gev)
            .field("points", data.track.points.len());
        content(RepContent::Text(body))
    })?;
    m.register::<(), _>(EXPAND, DEPOSITS_KIND, MODEL_3D, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<DepositData>()?;
        let prims = data
            .deposits
            .iter()
            .map(|d| Primitive::marker(0, call.object, point(&d.position), DEPOSIT_COLOR))
            .collect();
        content(RepContent::Primitives(prims))
    })?;
    m.register::<(), _>(EXPAND, DEPOSITS_KIND, MODEL_TEXT, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<DepositData>()?;
        let body = TextBody::new(format!("Deposits {} of event {}", data.group, data.event))
            .field("name", &data.group)
            .field("deposits", data.deposits.len())
            .field("energyGeV", data.total_energy());
        content(RepContent::Text(body))
    })
}

/// Detector volume handlers for the 3D and text models.
pub fn register_geometry_reps(m: &mut MethodRegistry) -> Result<(), RepError> {
    register_stub(m, VOLUME_KIND, MODEL_3D)?;
    register_stub(m, VOLUME_KIND, MODEL_TEXT)?;
    m.register::<(), _>(EXPAND, VOLUME_KIND, MODEL_3D, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<VolumeData>()?;
        let color = if data.info.material == "silicon" {
            SILICON_COLOR
        } else {
            VOLUME_COLOR
        };
        let prim = data.solid.to_primitive(0, call.object, color, data.info.world);
        content(RepContent::Primitives(vec![prim]))
    })?;
    m.register::<(), _>(EXPAND, VOLUME_KIND, MODEL_TEXT, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<VolumeData>()?;
        let body = TextBody::new(data.path.to_string())
            .field("name", &data.info.logical)
            .field("material", &data.info.material)
            .field("sensitive", data.info.sensitive)
            .field("copy", data.info.copy)
            .field("daughters", data.info.daughters);
        content(RepContent::Text(body))
    })
}

/// Fallback text rep naming the object's kind.
pub fn register_text_fallback(m: &mut MethodRegistry) -> Result<(), RepError> {
    m.register::<(), _>(REPRESENT, ANY_KIND, MODEL_TEXT, |kit: &mut RepKit, call| {
        let kind = kit.object(call.object)?.kind().to_string();
        Ok(Box::new(Represented::Expanded(RepContent::Text(
            TextBody::new(format!("Object {}", call.object)).field("kind", kind),
        ))))
    })
}

pub const ETA_BIN: f64 = 0.1;
pub const PHI_BIN: f64 = std::f64::consts::PI / 32.0;

/// Eta-phi summary of a deposit group, for the `lego` model.
pub fn register_etaphi_reps(m: &mut MethodRegistry) -> Result<(), RepError> {
    register_stub(m, DEPOSITS_KIND, MODEL_LEGO)?;
    m.register::<(), _>(EXPAND, DEPOSITS_KIND, MODEL_LEGO, |kit: &mut RepKit, call| {
        let data = kit.object_mut(call.object)?.payload::<DepositData>()?;
        let deposits: Vec<EnergyDeposit> = data
            .deposits
            .iter()
            .map(|d| EnergyDeposit::new(d.position[0], d.position[1], d.position[2], d.energy_gev))
            .collect();
        let map = eta_phi_project(&deposits, ETA_BIN, PHI_BIN).map_err(|e| RepError::Handler(e.to_string()))?;
        let peak = map
            .bins
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(bin, e)| format!("({}, {}) {e:.3}", bin.0, bin.1))
            .unwrap_or_else(|| "none".into());
        let body = TextBody::new(format!("Eta-phi map of {}", data.group))
            .field("bins", map.bins.len())
            .field("energyGeV", map.total_energy())
            .field("peak", peak)
            .field("onAxis", map.rejected.len());
        content(RepContent::Text(body))
    })
}
