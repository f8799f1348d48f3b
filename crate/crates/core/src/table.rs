//! Self-describing numeric tables: CSV with a `#`-prefixed JSON metadata
//! line, or a single JSON document.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::NetworkScenario;

/// Provenance of a table: enough to re-run the command that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the scenario's canonical JSON form.
    pub scenario_digest: String,
    pub scenario: Value,
    pub seed: Option<u64>,
    /// Command arguments and derived results (optimizer output, windows).
    pub extras: Map<String, Value>,
}

impl Metadata {
    pub fn new(command: &str, scenario: &NetworkScenario, seed: Option<u64>) -> Self {
        let canonical = scenario.to_json();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            scenario_digest: scenario_digest(scenario),
            scenario: serde_json::from_str(&canonical).expect("scenario JSON is valid"),
            seed,
            extras: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("metadata values serialize");
        self.extras.insert(key.to_string(), v);
    }
}

/// Hex SHA-256 of the canonical scenario JSON.
pub fn scenario_digest(s: &NetworkScenario) -> String {
    hex::encode(Sha256::digest(s.to_json().as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveTable {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl CurveTable {
    pub fn new(metadata: Metadata, columns: &[&str]) -> Self {
        Self {
            metadata,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Domain(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Values use the shortest representation that round-trips, so equal
    /// tables print identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let meta = serde_json::to_string(&self.metadata).expect("metadata serializes");
        writeln!(out, "# {meta}").unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelParams, PathLossExponent, ShapeFunction};

    fn scenario() -> NetworkScenario {
        NetworkScenario::new(
            ShapeFunction::exp_power(100.0, 3.0).unwrap(),
            1e-3,
            ChannelParams::new(PathLossExponent::Four, 1.0, 10.0, 0.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn csv_layout() {
        let meta = Metadata::new("op-curve", &scenario(), Some(7)).with("grid", "0:10:5");
        let mut t = CurveTable::new(meta, &["y0", "q"]);
        t.push(vec![0.0, 0.25]).unwrap();
        t.push(vec![5.0, 1.0 / 3.0]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# {"));
        let meta: Value = serde_json::from_str(&lines[0][2..]).unwrap();
        assert_eq!(meta["command"], "op-curve");
        assert_eq!(meta["seed"], 7);
        assert_eq!(meta["extras"]["grid"], "0:10:5");
        assert_eq!(lines[1], "y0,q");
        assert_eq!(lines[2], "0,0.25");
        assert_eq!(lines[3].split(',').nth(1).unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(t.column("q").unwrap().len(), 2);
    }

    #[test]
    fn digest_is_stable_and_discriminating() {
        let a = scenario_digest(&scenario());
        assert_eq!(a, scenario_digest(&scenario()));
        assert_eq!(a.len(), 64);
        assert_ne!(a, scenario_digest(&scenario().with_lambda(2e-3)));
    }

    #[test]
    fn json_round_trip() {
        let mut t = CurveTable::new(Metadata::new("gamma-curve", &scenario(), None), &["y0"]);
        t.push(vec![1.5]).unwrap();
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rows"][0][0], 1.5);
        assert_eq!(v["columns"][0], "y0");
        assert!(v["metadata"]["seed"].is_null());
    }
}
