use std::collections::BTreeMap;
use std::fmt;

use super::ConfigError;
use crate::hub::{BroadcastReport, MessageBus, Payload, CONFIG_TOPIC};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    String,
    Number,
    Boolean,
    List,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::String => "string",
            ValueKind::Number => "number",
            ValueKind::Boolean => "boolean",
            ValueKind::List => "list",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    String(String),
    Number(f64),
    Boolean(bool),
    List(Vec<String>),
}

impl ConfigValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            ConfigValue::String(_) => ValueKind::String,
            ConfigValue::Number(_) => ValueKind::Number,
            ConfigValue::Boolean(_) => ValueKind::Boolean,
            ConfigValue::List(_) => ValueKind::List,
        }
    }

    /// Guesses the type of resource-file text: booleans, finite numbers,
    /// comma lists, otherwise a string.
    pub fn infer(text: &str) -> ConfigValue {
        let t = text.trim();
        match t {
            "true" => return ConfigValue::Boolean(true),
            "false" => return ConfigValue::Boolean(false),
            _ => {}
        }
        if let Some(n) = t.parse::<f64>().ok().filter(|n| n.is_finite()) {
            return ConfigValue::Number(n);
        }
        if t.contains(',') {
            return ConfigValue::List(t.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect());
        }
        ConfigValue::String(t.to_string())
    }

    /// Reads `text` as a value of `kind`.
    pub fn parse_as(kind: ValueKind, text: &str) -> Option<ConfigValue> {
        let t = text.trim();
        match kind {
            ValueKind::String => Some(ConfigValue::String(t.to_string())),
            ValueKind::Number => t.parse::<f64>().ok().filter(|n| n.is_finite()).map(ConfigValue::Number),
            ValueKind::Boolean => match t {
                "true" => Some(ConfigValue::Boolean(true)),
                "false" => Some(ConfigValue::Boolean(false)),
                _ => None,
            },
            ValueKind::List => Some(ConfigValue::List(
                t.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect(),
            )),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ConfigValue::Number(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for ConfigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigValue::String(s) => f.write_str(s),
            ConfigValue::Number(n) => write!(f, "{n}"),
            ConfigValue::Boolean(b) => write!(f, "{b}"),
            ConfigValue::List(items) => f.write_str(&items.join(",")),
        }
    }
}

/// Named numeric cuts; the unit is part of the key (`minEnergyGeV`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutSet {
    pub values: BTreeMap<String, f64>,
}

impl CutSet {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// True unless a `name` cut exists and `value` is below it.
    pub fn passes_min(&self, name: &str, value: f64) -> bool {
        self.get(name).map_or(true, |cut| value >= cut)
    }
}

/// Live key/value table whose changes are announced on the config topic.
#[derive(Debug, Clone, Default)]
pub struct ConfigService {
    values: BTreeMap<String, ConfigValue>,
    strict: bool,
}

impl ConfigService {
    pub fn new() -> Self {
        Self::default()
    }

    /// In strict mode only existing keys can be set.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn get(&self, key: &str) -> Option<&ConfigValue> {
        self.values.get(key)
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(ConfigValue::as_f64)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &ConfigValue)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Numeric entries whose key starts with `min` or `max`.
    pub fn cuts(&self) -> CutSet {
        CutSet {
            values: self
                .values
                .iter()
                .filter(|(k, _)| k.starts_with("min") || k.starts_with("max"))
                .filter_map(|(k, v)| Some((k.clone(), v.as_f64()?)))
                .collect(),
        }
    }

    /// Stores the value and broadcasts it unless nothing changed.
    pub fn set(
        &mut self,
        bus: &mut MessageBus,
        key: &str,
        value: ConfigValue,
    ) -> Result<Option<BroadcastReport>, ConfigError> {
        match self.values.get(key) {
            Some(current) if current.kind() != value.kind() => {
                return Err(ConfigError::TypeMismatch {
                    key: key.to_string(),
                    expected: current.kind(),
                    found: value.kind(),
                })
            }
            Some(current) if *current == value => return Ok(None),
            None if self.strict => return Err(ConfigError::UnknownKey(key.to_string())),
            _ => {}
        }
        let text = value.to_string();
        self.values.insert(key.to_string(), value);
        Ok(Some(bus.broadcast(
            CONFIG_TOPIC,
            Payload::Config {
                key: key.to_string(),
                value: text,
            },
        )))
    }

    /// Like [`set`](Self::set), reading `text` with the existing key's type
    /// (or inferring one for a new key).
    pub fn set_text(
        &mut self,
        bus: &mut MessageBus,
        key: &str,
        text: &str,
    ) -> Result<Option<BroadcastReport>, ConfigError> {
        let value = match self.values.get(key) {
            Some(current) => ConfigValue::parse_as(current.kind(), text).ok_or_else(|| ConfigError::BadValue {
                key: key.to_string(),
                text: text.to_string(),
                expected: current.kind(),
            })?,
            None => ConfigValue::infer(text),
        };
        self.set(bus, key, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::rc::Rc;

    fn observed(bus: &mut MessageBus) -> Rc<RefCell<Vec<(String, String)>>> {
        let log = Rc::new(RefCell::new(Vec::new()));
        let l = log.clone();
        bus.subscribe(CONFIG_TOPIC, "log", move |m, _| {
            if let Payload::Config { key, value } = &m.payload {
                l.borrow_mut().push((key.clone(), value.clone()));
            }
            Ok(())
        });
        log
    }

    #[test]
    fn change_then_no_op() {
        let mut bus = MessageBus::new();
        let log = observed(&mut bus);
        let mut cfg = ConfigService::new();
        cfg.set(&mut bus, "minEnergyGeV", ConfigValue::Number(1.5)).unwrap();
        assert!(cfg.set(&mut bus, "minEnergyGeV", ConfigValue::Number(2.0)).unwrap().is_some());
        assert!(cfg.set(&mut bus, "minEnergyGeV", ConfigValue::Number(2.0)).unwrap().is_none());
        assert_eq!(log.borrow().len(), 2);
        assert_eq!(log.borrow()[1], ("minEnergyGeV".to_string(), "2".to_string()));
        assert_eq!(cfg.cuts().get("minEnergyGeV"), Some(2.0));
    }

    #[test]
    fn type_mismatch() {
        let mut bus = MessageBus::new();
        let mut cfg = ConfigService::new();
        cfg.set(&mut bus, "minEnergyGeV", ConfigValue::Number(1.5)).unwrap();
        assert!(matches!(
            cfg.set(&mut bus, "minEnergyGeV", ConfigValue::String("abc".into())),
            Err(ConfigError::TypeMismatch { .. })
        ));
        assert!(matches!(
            cfg.set_text(&mut bus, "minEnergyGeV", "abc"),
            Err(ConfigError::BadValue { .. })
        ));
        cfg.set_text(&mut bus, "minEnergyGeV", "3").unwrap();
        assert_eq!(cfg.number("minEnergyGeV"), Some(3.0));
    }

    #[test]
    fn strict_mode() {
        let mut bus = MessageBus::new();
        let mut cfg = ConfigService::new().strict(true);
        assert!(matches!(
            cfg.set(&mut bus, "x", ConfigValue::Boolean(true)),
            Err(ConfigError::UnknownKey(_))
        ));
    }

    #[test]
    fn inference() {
        assert_eq!(ConfigValue::infer("true"), ConfigValue::Boolean(true));
        assert_eq!(ConfigValue::infer(" 1.5 "), ConfigValue::Number(1.5));
        assert_eq!(ConfigValue::infer("a, b"), ConfigValue::List(vec!["a".into(), "b".into()]));
        assert_eq!(ConfigValue::infer("inf"), ConfigValue::String("inf".into()));
        assert_eq!(ConfigValue::infer("Z"), ConfigValue::String("Z".into()));
    }

    #[test]
    fn cut_set() {
        let mut cuts = CutSet::default();
        assert!(cuts.passes_min("minEnergyGeV", 0.1));
        cuts.values.insert("minEnergyGeV".into(), 1.5);
        assert!(!cuts.passes_min("minEnergyGeV", 1.4));
        assert!(cuts.passes_min("minEnergyGeV", 1.5));
    }
}
