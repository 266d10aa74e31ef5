//! Event records and the line-per-event JSON source.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub particle: String,
    /// Polyline in mm.
    pub points: Vec<[f64; 3]>,
    #[serde(rename = "energyGeV")]
    pub energy_gev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deposit {
    /// Calorimeter or detector group the deposit belongs to.
    pub group: String,
    pub position: [f64; 3],
    #[serde(rename = "energyGeV")]
    pub energy_gev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: u64,
    #[serde(default)]
    pub tracks: Vec<Track>,
    #[serde(default)]
    pub deposits: Vec<Deposit>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EventError {
    #[error("end of event collection")]
    EndOfCollection,
    #[error("corrupt event on line {line}: {reason}")]
    CorruptEvent { line: usize, reason: String },
    #[error("cannot read events: {0}")]
    Io(String),
}

/// Reads one JSON event per line. Blank lines are skipped; ids must grow
/// strictly.
pub struct EventSource {
    lines: Box<dyn BufRead + Send>,
    line: usize,
    last_id: Option<u64>,
}

impl EventSource {
    pub fn open(path: &Path) -> Result<Self, EventError> {
        let file = File::open(path).map_err(|e| EventError::Io(format!("{}: {e}", path.display())))?;
        Ok(Self::from_reader(file))
    }

    pub fn from_reader(reader: impl Read + Send + 'static) -> Self {
        Self {
            lines: Box::new(BufReader::new(reader)),
            line: 0,
            last_id: None,
        }
    }

    pub fn next_event(&mut self) -> Result<EventRecord, EventError> {
        loop {
            let mut buf = String::new();
            let n = self
                .lines
                .read_line(&mut buf)
                .map_err(|e| EventError::Io(e.to_string()))?;
            if n == 0 {
                return Err(EventError::EndOfCollection);
            }
            self.line += 1;
            if buf.trim().is_empty() {
                continue;
            }
            let corrupt = |reason: String| EventError::CorruptEvent {
                line: self.line,
                reason,
            };
            let record: EventRecord = serde_json::from_str(&buf).map_err(|e| corrupt(e.to_string()))?;
            if self.last_id.is_some_and(|last| record.id <= last) {
                return Err(corrupt(format!("event id {} does not increase", record.id)));
            }
            let bad_number = record
                .tracks
                .iter()
                .flat_map(|t| t.points.iter().flatten().chain([&t.energy_gev]))
                .chain(record.deposits.iter().flat_map(|d| d.position.iter().chain([&d.energy_gev])))
                .any(|v| !v.is_finite());
            if bad_number {
                return Err(corrupt("non-finite number".into()));
            }
            self.last_id = Some(record.id);
            return Ok(record);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(text: &'static str) -> EventSource {
        EventSource::from_reader(text.as_bytes())
    }

    #[test]
    fn three_events_then_end() {
        let mut s = source("{\"id\":1}\n\n{\"id\":2}\n{\"id\":5,\"tracks\":[]}\n");
        for id in [1, 2, 5] {
            assert_eq!(s.next_event().unwrap().id, id);
        }
        assert_eq!(s.next_event(), Err(EventError::EndOfCollection));
        assert_eq!(s.next_event(), Err(EventError::EndOfCollection));
    }

    #[test]
    fn corrupt_lines_are_located() {
        let mut s = source("{\"id\":1}\n{\"id\":\n");
        s.next_event().unwrap();
        assert!(matches!(s.next_event(), Err(EventError::CorruptEvent { line: 2, .. })));

        let mut s = source("{\"id\":3}\n{\"id\":3}\n");
        s.next_event().unwrap();
        assert!(matches!(s.next_event(), Err(EventError::CorruptEvent { line: 2, .. })));
    }
}
