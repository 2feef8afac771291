//! Checks, summaries and artifact output.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// One invariant compared against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Residual; `null` when the invariant could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value <= tolerance`; NaN fails.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value: value.is_finite().then_some(value),
            tolerance: Some(tolerance),
            passed: value <= tolerance,
            detail: None,
        }
    }

    pub fn holds(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), value: None, tolerance: None, passed, detail: Some(detail.into()) }
    }

    /// An invariant whose evaluation failed with `message`.
    pub fn failed(name: &str, message: impl Into<String>) -> Check {
        Check { name: name.into(), value: None, tolerance: None, passed: false, detail: Some(message.into()) }
    }
}

/// A CSV dump.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Table {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub details: serde_json::Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.details.insert(key.into(), v);
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub pointer: Option<String>,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub task: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: serde_json::Map<String, Value>,
    pub artifacts: Vec<String>,
    pub error: Option<ErrorReport>,
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write(out: &Path, summary: &Summary, tables: &[Table]) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for t in tables {
        let path = out.join(&t.name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    let path = out.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
