//! INI-style resource files; the grammar is in `docs/formats.md`.

use super::ConfigError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub kind: String,
    pub qualifier: Option<String>,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(kind: impl Into<String>, qualifier: Option<&str>) -> Self {
        Self {
            kind: kind.into(),
            qualifier: qualifier.map(str::to_string),
            entries: Vec::new(),
        }
    }

    pub fn header(&self) -> String {
        match &self.qualifier {
            Some(q) => format!("{}:{q}", self.kind),
            None => self.kind.clone(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Comma-separated list with blanks dropped.
    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect())
            .unwrap_or_default()
    }

    /// Replaces an existing value in place; returns the previous one.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Option<String> {
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => Some(std::mem::replace(v, value)),
            None => {
                self.entries.push((key.to_string(), value));
                None
            }
        }
    }
}

/// Sections in file order. Equality ignores warnings.
#[derive(Debug, Clone, Default)]
pub struct ResourceFile {
    pub sections: Vec<Section>,
    pub warnings: Vec<String>,
}

impl PartialEq for ResourceFile {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
    }
}

impl ResourceFile {
    pub fn section(&self, kind: &str, qualifier: Option<&str>) -> Option<&Section> {
        self.sections
            .iter()
            .find(|s| s.kind == kind && s.qualifier.as_deref() == qualifier)
    }

    pub fn sections_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections.iter().filter(move |s| s.kind == kind)
    }
}

fn syntax(line: usize, reason: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        reason: reason.into(),
    }
}

pub fn parse_resource(text: &str) -> Result<ResourceFile, ConfigError> {
    let mut rf = ResourceFile::default();
    let mut current: Option<usize> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unclosed section bracket"))?
                .trim();
            let (kind, qualifier) = match inner.split_once(':') {
                Some((k, q)) => (k.trim(), Some(q.trim())),
                None => (inner, None),
            };
            if kind.is_empty() || kind.contains(['[', ']']) || qualifier.is_some_and(|q| q.is_empty() || q.contains(['[', ']'])) {
                return Err(syntax(line, format!("bad section name {inner:?}")));
            }
            let existing = rf
                .sections
                .iter()
                .position(|s| s.kind == kind && s.qualifier.as_deref() == qualifier);
            current = Some(match existing {
                Some(i) => {
                    rf.warnings.push(format!("line {line}: section [{inner}] repeated, merged into the first"));
                    i
                }
                None => {
                    rf.sections.push(Section::new(kind, qualifier));
                    rf.sections.len() - 1
                }
            });
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| syntax(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(syntax(line, "empty key"));
        }
        let section = current.ok_or_else(|| syntax(line, "entry before any section"))?;
        let section = &mut rf.sections[section];
        if section.set(key, value).is_some() {
            rf.warnings.push(format!(
                "line {line}: key {key:?} repeated in [{}], last value wins",
                section.header()
            ));
        }
    }
    Ok(rf)
}

/// Canonical text: sections in order separated by blank lines, one
/// `key = value` per line, no comments.
pub fn serialize_resource(rf: &ResourceFile) -> String {
    let mut out = String::new();
    for (i, section) in rf.sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("[{}]\n", section.header()));
        for (k, v) in &section.entries {
            if v.is_empty() {
                out.push_str(&format!("{k} =\n"));
            } else {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
    }
    out
}
