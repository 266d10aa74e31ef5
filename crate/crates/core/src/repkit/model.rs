use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ModelId, RepError, RepId, ReprId};
use crate::scene::Primitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepState {
    /// Created but not filled; content is empty.
    Stub,
    Expanded,
    /// Expanded and edited since the last commit.
    Dirty,
}

/// Structured text shown by text browsers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TextBody {
    pub title: String,
    pub fields: Vec<(String, String)>,
}

impl TextBody {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, name: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((name.into(), value.to_string()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_html(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "<h3>{}</h3><table>", escape(&self.title));
        for (name, value) in &self.fields {
            let _ = write!(out, "<tr><th>{}</th><td>{}</td></tr>", escape(name), escape(value));
        }
        out.push_str("</table>");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Model-specific rep data.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum RepContent {
    #[default]
    Empty,
    Primitives(Vec<Primitive>),
    Text(TextBody),
    Twig { label: String, children: Vec<RepId> },
}

/// What a `represent` handler hands back to `make_rep`.
#[derive(Debug, Clone, PartialEq)]
pub enum Represented {
    Stub,
    Expanded(RepContent),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rep {
    pub id: RepId,
    pub model: ModelId,
    pub object: ReprId,
    pub state: RepState,
    pub content: RepContent,
}

/// The reps one browser displays.
#[derive(Debug, Clone)]
pub struct Model {
    id: ModelId,
    kind: String,
    reps: BTreeMap<RepId, Rep>,
    index: BTreeMap<ReprId, Vec<RepId>>,
}

impl Model {
    pub(super) fn new(id: ModelId, kind: impl Into<String>) -> Self {
        Self {
            id,
            kind: kind.into(),
            reps: BTreeMap::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, id: RepId) -> Option<&Rep> {
        self.reps.get(&id)
    }

    pub fn reps(&self) -> impl Iterator<Item = &Rep> {
        self.reps.values()
    }

    /// Reps indexed under `object` (at most one).
    pub fn reps_of(&self, object: ReprId) -> &[RepId] {
        self.index.get(&object).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rep_for(&self, object: ReprId) -> Option<RepId> {
        self.reps_of(object).first().copied()
    }

    pub fn objects(&self) -> impl Iterator<Item = ReprId> + '_ {
        self.index.keys().copied()
    }

    pub(super) fn insert(&mut self, rep: Rep) {
        self.index.entry(rep.object).or_default().push(rep.id);
        self.reps.insert(rep.id, rep);
    }

    pub(super) fn rep_mut(&mut self, id: RepId) -> Result<&mut Rep, RepError> {
        let model = self.id;
        self.reps
            .get_mut(&id)
            .ok_or(RepError::RepNotInModel { rep: id, model })
    }

    pub fn remove_rep(&mut self, id: RepId) -> Option<Rep> {
        let rep = self.reps.remove(&id)?;
        if let Some(ids) = self.index.get_mut(&rep.object) {
            ids.retain(|r| *r != id);
            if ids.is_empty() {
                self.index.remove(&rep.object);
            }
        }
        Some(rep)
    }

    /// Drops every rep whose object is not accepted by `keep`. Returns the
    /// number removed.
    pub fn retain_objects(&mut self, mut keep: impl FnMut(ReprId) -> bool) -> usize {
        let doomed: Vec<RepId> = self
            .reps
            .values()
            .filter(|r| !keep(r.object))
            .map(|r| r.id)
            .collect();
        for id in &doomed {
            self.remove_rep(*id);
        }
        doomed.len()
    }

    pub fn clear(&mut self) {
        self.reps.clear();
        self.index.clear();
    }
}
