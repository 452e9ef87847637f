use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One measured quantity and the bound it is held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Measurement {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Measurement {
            name: name.into(),
            value,
            bound,
            relation: Relation::AtMost,
            pass: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Measurement {
            name: name.into(),
            value,
            bound,
            relation: Relation::AtLeast,
            pass: value >= bound,
        }
    }
}

/// Per-sample detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub label: String,
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Result of one check, or of a suite when `checks` is non-empty.
///
/// The verdict is `pass` exactly when every entry of `measured` passes and
/// every nested check passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub samples: Vec<SampleRecord>,
    pub measured: Vec<Measurement>,
    pub bound: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, bound: f64) -> Self {
        CheckReport {
            name: name.into(),
            params: BTreeMap::new(),
            samples: Vec::new(),
            measured: Vec::new(),
            bound,
            verdict: Verdict::Fail,
            checks: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn sample(&mut self, label: impl Into<String>, point: &[f64], value: f64) {
        self.samples.push(SampleRecord {
            label: label.into(),
            point: point.to_vec(),
            value: Some(value),
            error: None,
        });
    }

    pub fn sample_error(&mut self, label: impl Into<String>, point: &[f64], error: impl ToString) {
        self.samples.push(SampleRecord {
            label: label.into(),
            point: point.to_vec(),
            value: None,
            error: Some(error.to_string()),
        });
    }

    pub fn measure(&mut self, m: Measurement) {
        self.measured.push(m);
    }

    pub fn failed_samples(&self) -> usize {
        self.samples.iter().filter(|s| s.error.is_some()).count()
    }

    /// Adds the failed-sample count as a measurement and fixes the verdict.
    pub fn finish(mut self) -> Self {
        let failed = self.failed_samples();
        self.measured
            .push(Measurement::at_most("failed_samples", failed as f64, 0.0));
        self.verdict = if self.measured.iter().all(|m| m.pass)
            && self.checks.iter().all(|c| c.verdict.passed())
        {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn measurement(&self, name: &str) -> Option<&Measurement> {
        self.measured.iter().find(|m| m.name == name)
    }

    pub fn find(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}
