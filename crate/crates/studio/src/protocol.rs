//! Newline-delimited JSON commands and notices. See `protocol.md`.

use std::str::FromStr;

use evd_core::hub::{SelectionMode, ViewClass};
use evd_core::repkit::ReprId;
use evd_core::scene::{Axis, Plane};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::app::{Studio, StudioError, VectorKind};

pub const PROTOCOL_VERSION: &str = "1";

/// Commands the server understands, besides `shutdown`.
pub const COMMANDS: [&str; 10] = [
    "nextEvent",
    "setVisibility",
    "pick2d",
    "select",
    "setConfig",
    "exportVector",
    "getTwigTree",
    "getTextRep",
    "listSelectors",
    "runSelector",
];

/// Server to client. Replies carry the command's id; pushed notices have
/// none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Notice {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
    #[serde(default)]
    pub payload: Value,
}

impl Notice {
    pub fn event(kind: &str, payload: Value) -> Self {
        Self {
            kind: kind.into(),
            id: None,
            payload,
        }
    }

    pub fn hello() -> Self {
        Self::event("hello", json!({ "protocol": PROTOCOL_VERSION, "commands": COMMANDS }))
    }

    pub fn ok(id: Value, payload: Value) -> Self {
        Self {
            kind: "ok".into(),
            id: Some(id),
            payload,
        }
    }

    pub fn warning(id: Value, message: &str) -> Self {
        Self {
            kind: "warning".into(),
            id: Some(id),
            payload: json!({ "message": message }),
        }
    }

    pub fn error(id: Value, err: &CommandError) -> Self {
        Self {
            kind: "error".into(),
            id: Some(id),
            payload: json!({ "code": err.code(), "message": err.to_string() }),
        }
    }

    /// One line of JSON, without the newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("notices serialize")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub cmd: String,
    pub id: Value,
    pub args: Map<String, Value>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CommandError {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("bad or missing field {0:?}")]
    SchemaError(String),
    #[error("{0}")]
    Failed(String),
}

impl CommandError {
    pub fn code(&self) -> &'static str {
        match self {
            CommandError::Malformed(_) => "Malformed",
            CommandError::UnknownCommand(_) => "UnknownCommand",
            CommandError::SchemaError(_) => "SchemaError",
            CommandError::Failed(_) => "Failed",
        }
    }
}

impl From<StudioError> for CommandError {
    fn from(e: StudioError) -> Self {
        CommandError::Failed(e.to_string())
    }
}

/// Parses one command line. On failure the error comes with whatever id
/// could be recovered, `null` if none.
pub fn parse_line(line: &str) -> Result<Command, (Value, CommandError)> {
    let value: Value = serde_json::from_str(line).map_err(|e| (Value::Null, CommandError::Malformed(e.to_string())))?;
    let Value::Object(mut obj) = value else {
        return Err((Value::Null, CommandError::Malformed("expected a JSON object".into())));
    };
    let id = obj.remove("id").unwrap_or(Value::Null);
    let cmd = match obj.remove("cmd") {
        Some(Value::String(s)) => s,
        _ => return Err((id, CommandError::SchemaError("cmd".into()))),
    };
    let args = match obj.remove("args") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m,
        Some(_) => return Err((id, CommandError::SchemaError("args".into()))),
    };
    Ok(Command { cmd, id, args })
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    Ok(Value),
    /// Accepted but had no effect, with the reason.
    Warning(String),
}

fn schema(field: &str) -> CommandError {
    CommandError::SchemaError(field.into())
}

fn arg_str<'a>(args: &'a Map<String, Value>, field: &str) -> Result<&'a str, CommandError> {
    args.get(field).and_then(Value::as_str).ok_or_else(|| schema(field))
}

fn arg_f64(args: &Map<String, Value>, field: &str) -> Result<f64, CommandError> {
    args.get(field).and_then(Value::as_f64).filter(|v| v.is_finite()).ok_or_else(|| schema(field))
}

fn arg_bool(args: &Map<String, Value>, field: &str) -> Result<bool, CommandError> {
    args.get(field).and_then(Value::as_bool).ok_or_else(|| schema(field))
}

fn arg_id(args: &Map<String, Value>, field: &str) -> Result<ReprId, CommandError> {
    args.get(field).and_then(Value::as_u64).map(ReprId).ok_or_else(|| schema(field))
}

fn arg_axis(args: &Map<String, Value>, field: &str) -> Result<Axis, CommandError> {
    Axis::from_str(arg_str(args, field)?).map_err(|_| schema(field))
}

fn arg_slice(args: &Map<String, Value>) -> Result<Option<Plane>, CommandError> {
    match args.get("slice") {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Plane::parse(s).map(Some).map_err(|_| schema("slice")),
        Some(_) => Err(schema("slice")),
    }
}

/// Runs `cmd` against the studio. `nextEvent` reads from the studio's own
/// source; the server routes it through its producer instead.
pub fn execute(studio: &mut Studio, cmd: &Command) -> Result<Reply, CommandError> {
    let args = &cmd.args;
    match cmd.cmd.as_str() {
        "nextEvent" => {
            let id = studio.next_event()?;
            Ok(Reply::Ok(event_summary(studio, id)))
        }
        "setVisibility" => {
            let path = arg_str(args, "path")?;
            let view = ViewClass::from_str(arg_str(args, "viewClass")?).map_err(|_| schema("viewClass"))?;
            let self_visible = arg_bool(args, "self")?;
            let descendants = arg_bool(args, "descendants")?;
            if !studio.twigs.contains(path) {
                return Ok(Reply::Warning(format!("UnknownTwigPath: {path}")));
            }
            let changed = studio.set_visibility(path, view, self_visible, descendants)?;
            Ok(Reply::Ok(json!({ "changed": changed })))
        }
        "pick2d" => {
            let axis = arg_axis(args, "view")?;
            let hit = studio.pick(axis, arg_f64(args, "u")?, arg_f64(args, "v")?)?;
            // a hit replaces the selection; a miss leaves it alone
            if let Some(id) = hit {
                studio.select(&[id], SelectionMode::Replace)?;
            }
            Ok(Reply::Ok(json!({ "id": hit.map(|h| h.0) })))
        }
        "select" => {
            let ids = args
                .get("ids")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("ids"))?
                .iter()
                .map(|v| v.as_u64().map(ReprId).ok_or_else(|| schema("ids")))
                .collect::<Result<Vec<_>, _>>()?;
            let mode = match args.get("mode").map(|m| m.as_str()) {
                None | Some(Some("replace")) => SelectionMode::Replace,
                Some(Some("add")) => SelectionMode::Add,
                Some(Some("toggle")) => SelectionMode::Toggle,
                _ => return Err(schema("mode")),
            };
            let selection = studio.select(&ids, mode)?;
            Ok(Reply::Ok(json!({ "selection": selection.iter().map(|i| i.0).collect::<Vec<_>>() })))
        }
        "setConfig" => {
            let key = arg_str(args, "key")?;
            let text = match args.get("value") {
                Some(Value::String(s)) => s.clone(),
                Some(v @ (Value::Number(_) | Value::Bool(_))) => v.to_string(),
                _ => return Err(schema("value")),
            };
            let changed = studio.set_config(key, &text)?;
            Ok(Reply::Ok(json!({ "changed": changed })))
        }
        "exportVector" => {
            let kind = match args.get("kind").map(|k| k.as_str()) {
                None | Some(Some("svg")) => VectorKind::Svg,
                Some(Some("eps")) => VectorKind::Eps,
                _ => return Err(schema("kind")),
            };
            let axis = match args.get("view") {
                None => studio.view.axis,
                Some(_) => arg_axis(args, "view")?,
            };
            let slice = arg_slice(args)?;
            let out = studio.export(kind, axis, slice.as_ref())?;
            Ok(Reply::Ok(json!({
                "kind": kind.name(),
                "document": String::from_utf8_lossy(&out.bytes),
                "primitives": out.stats.after_occlusion,
                "input": out.stats.input,
            })))
        }
        "getTwigTree" => Ok(Reply::Ok(studio.twig_tree_json())),
        "getTextRep" => {
            let id = arg_id(args, "id")?;
            let model = match args.get("model") {
                None => crate::reps::MODEL_TEXT,
                Some(_) => arg_str(args, "model")?,
            };
            let body = studio.text_rep_in(id, model)?;
            let fields: Map<String, Value> = body.fields.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            Ok(Reply::Ok(json!({ "id": id.0, "title": body.title, "fields": fields, "html": body.to_html() })))
        }
        "listSelectors" => Ok(Reply::Ok(json!({ "selectors": Studio::SELECTORS }))),
        "runSelector" => {
            let kind = arg_str(args, "kind")?;
            let arg = match kind {
                "sensitive" => "",
                _ => arg_str(args, "arg")?,
            };
            Ok(Reply::Ok(studio.run_selector(kind, arg)?))
        }
        other => Err(CommandError::UnknownCommand(other.to_string())),
    }
}

pub fn event_summary(studio: &Studio, id: u64) -> Value {
    let event = studio.event();
    json!({
        "event": id,
        "tracks": event.map_or(0, |e| e.tracks.len()),
        "depositGroups": event.map_or(0, |e| e.deposits.len()),
    })
}

/// A reply notice for the outcome of `cmd`.
pub fn reply_notice(id: Value, result: Result<Reply, CommandError>) -> Notice {
    match result {
        Ok(Reply::Ok(payload)) => Notice::ok(id, payload),
        Ok(Reply::Warning(message)) => Notice::warning(id, &message),
        Err(e) => Notice::error(id, &e),
    }
}

/// Runs one line in process: the reply, then any notices it caused,
/// ending with a scene update if the drawing changed.
pub fn handle_line(studio: &mut Studio, line: &str) -> Vec<Notice> {
    let reply = match parse_line(line) {
        Ok(cmd) => reply_notice(cmd.id.clone(), execute(studio, &cmd)),
        Err((id, e)) => Notice::error(id, &e),
    };
    let mut out = vec![reply];
    out.extend(follow_ups(studio));
    out
}

/// Notices queued by the last command plus a scene update when needed.
pub fn follow_ups(studio: &mut Studio) -> Vec<Notice> {
    let mut out = studio.drain_notices();
    if studio.take_scene_dirty() {
        match studio.scene_notice() {
            Ok(n) => out.push(n),
            Err(e) => out.push(Notice::event("warning", json!({ "message": e.to_string() }))),
        }
    }
    out
}
