//! Result records and their CSV / JSON serialization.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // non-finite floats become null
            Cell::Float(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Bool(v) => json!(v),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Float(v) if !v.is_finite() => "NaN".to_string(),
            Cell::Text(v) => v.clone(),
            other => other.to_json().to_string(),
        }
    }
}

/// One invariant evaluated by a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), value, tolerance, passed: value <= tolerance }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), value, tolerance, passed: value >= tolerance }
    }
}

/// Rows in trial order plus the checks they were tested against.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = &Cell> + '_> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(move |r| &r[k]))
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub output: ExperimentOutput,
    pub library_version: &'static str,
    pub rng_algorithm: &'static str,
    pub wall_clock_seconds: f64,
}

impl ResultRecord {
    pub fn metadata(&self) -> Value {
        json!({
            "experiment": self.experiment,
            "schema_version": self.config.schema_version,
            "seed": self.config.seed,
            "library_version": self.library_version,
            "rng_algorithm": self.rng_algorithm,
            "wall_clock_seconds": self.wall_clock_seconds,
            "passed": self.output.passed(),
            "config": self.config,
            "planned_cells": (self.experiment == "sweep").then(|| self.config.planned_cells()),
            "columns": self.output.columns,
            "checks": self.output.checks,
        })
    }

    pub fn rows_json(&self) -> Value {
        let rows = self
            .output
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.output.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn write_json(&self, w: impl Write) -> serde_json::Result<()> {
        let doc = json!({ "metadata": self.metadata(), "rows": self.rows_json() });
        serde_json::to_writer_pretty(w, &doc)
    }

    /// Header and metric rows only; metadata goes to a sidecar.
    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.output.columns)?;
        for row in &self.output.rows {
            out.write_record(row.iter().map(Cell::to_csv))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ResultRecord {
        ResultRecord {
            experiment: "demo".into(),
            config: ExperimentConfig::default(),
            output: ExperimentOutput {
                columns: vec!["trial", "value", "label", "ok"],
                rows: vec![
                    vec![0usize.into(), 1e-10.into(), "a,b".into(), true.into()],
                    vec![1usize.into(), f64::NAN.into(), "c".into(), false.into()],
                ],
                checks: vec![Check::at_most("value", 1e-10, 1e-9)],
            },
            library_version: "0.0.0",
            rng_algorithm: "test",
            wall_clock_seconds: 0.5,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        record().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "trial,value,label,ok\n0,1e-10,\"a,b\",true\n1,NaN,c,false\n");
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        record().write_json(&mut buf).unwrap();
        let doc: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["rows"][0]["value"], json!(1e-10));
        assert_eq!(doc["rows"][1]["value"], Value::Null);
        assert_eq!(doc["metadata"]["checks"][0]["passed"], json!(true));
        assert_eq!(doc["metadata"]["config"]["tolerances"]["balance"], json!(1e-9));
        let keys: Vec<_> = doc["rows"][0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["trial", "value", "label", "ok"]);
    }
}
