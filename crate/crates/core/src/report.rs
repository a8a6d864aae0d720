//! Structured experiment results.
//!
//! A report serializes to one JSON object with the stable top-level keys
//! `name`, `params`, `measurements`, `tolerances`, `checks`, `verdict`,
//! `anchors` and `notes`. Maps are ordered, so identical runs produce
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Array(Vec<f64>),
    Text(String),
    Json(serde_json::Value),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Number(v as f64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Number(v as f64)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Array(v)
    }
}

impl From<Vec<usize>> for Value {
    fn from(v: Vec<usize>) -> Self {
        Value::Array(v.into_iter().map(|x| x as f64).collect())
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<serde_json::Value> for Value {
    fn from(v: serde_json::Value) -> Self {
        Value::Json(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One named pass/fail check and the fact it exercises.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub anchor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub measurements: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub anchors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report {
            name: name.to_string(),
            params: BTreeMap::new(),
            measurements: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            verdict: Verdict::Pass,
            anchors: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn measure(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.measurements.insert(key.to_string(), v.into());
        self
    }

    pub fn tolerance(&mut self, key: &str, tol: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), tol);
        self
    }

    /// Records a check; the verdict fails as soon as one check fails.
    pub fn check(&mut self, name: &str, passed: bool, anchor: &str) -> &mut Self {
        self.checks.push(Check { name: name.to_string(), passed, anchor: anchor.to_string() });
        if !self.anchors.iter().any(|a| a == anchor) {
            self.anchors.push(anchor.to_string());
        }
        if !passed {
            self.verdict = Verdict::Fail;
        }
        self
    }

    pub fn note(&mut self, text: &str) -> &mut Self {
        self.notes.push(text.to_string());
        self
    }

    /// Copies another report's params, measurements, tolerances, checks and
    /// notes under `prefix`. Its failures fail this report.
    pub fn absorb(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.params {
            self.params.insert(format!("{prefix}{k}"), v.clone());
        }
        for (k, v) in &other.measurements {
            self.measurements.insert(format!("{prefix}{k}"), v.clone());
        }
        for (k, v) in &other.tolerances {
            self.tolerances.insert(format!("{prefix}{k}"), *v);
        }
        for c in &other.checks {
            self.check(&format!("{prefix}{}", c.name), c.passed, &c.anchor);
        }
        for note in &other.notes {
            self.notes.push(format!("{prefix}{note}"));
        }
        self
    }

    /// A failed report for an experiment that stopped with an error.
    pub fn errored(name: &str, err: &dyn std::fmt::Display) -> Report {
        let mut r = Report::new(name);
        r.check("experiment ran to completion", false, "experiment preconditions");
        r.note(&format!("error: {err}"));
        r
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.measurements.get(key) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn array(&self, key: &str) -> Option<&[f64]> {
        match self.measurements.get(key) {
            Some(Value::Array(v)) => Some(v),
            _ => None,
        }
    }

    pub fn check_passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }
}
