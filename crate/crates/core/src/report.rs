//! Machine-readable run reports emitted by the CLI.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// JSON Schema describing [`RunReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

/// A dB value; infinities serialize as the strings `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Db(pub f64);

impl Serialize for Db {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if self.0.is_nan() {
            s.serialize_str("nan")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl Db {
    /// Two-decimal rendering used for human-readable output.
    pub fn display(self) -> String {
        if self.0 == f64::INFINITY {
            "inf".into()
        } else if self.0 == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            format!("{:.2}", self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub parameters: Map<String, Value>,
    pub metrics: BTreeMap<String, Db>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            parameters: Map::new(),
            metrics: BTreeMap::new(),
            details: Map::new(),
            timing_ms: 0.0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn metric(&mut self, key: &str, db: f64) {
        self.metrics.insert(key.to_string(), Db(db));
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// `name: value dB` lines with two decimals.
    pub fn summary_lines(&self) -> Vec<String> {
        self.metrics
            .iter()
            .map(|(k, v)| format!("{k}: {} dB", v.display()))
            .collect()
    }
}
