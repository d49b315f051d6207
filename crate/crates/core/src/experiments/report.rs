use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The inputs lie outside the hypotheses of the bound being tested.
    NotApplicable,
    Inconclusive,
}

/// Inputs, measured arrays, bound and verdict of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub inputs: Value,
    pub measured: Value,
    /// Largest measured quantity compared against `bound`.
    pub measured_value: Option<f64>,
    pub bound: Option<f64>,
    pub tolerance: f64,
    /// `bound (1 + tolerance) − measured_value`.
    pub margin: Option<f64>,
    pub outcome: Outcome,
    pub notes: Vec<String>,
    /// Wall-clock seconds; left out of deterministic output.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_s: Option<f64>,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, inputs: Value) -> Self {
        ExperimentReport {
            name: name.into(),
            inputs,
            measured: Value::Null,
            measured_value: None,
            bound: None,
            tolerance: 0.0,
            margin: None,
            outcome: Outcome::Inconclusive,
            notes: Vec::new(),
            runtime_s: None,
        }
    }

    /// Sets measured value, bound and tolerance; the outcome follows from the
    /// margin unless already decided.
    pub(crate) fn compare(&mut self, measured: f64, bound: f64, tolerance: f64) {
        self.measured_value = Some(measured);
        self.bound = Some(bound);
        self.tolerance = tolerance;
        let margin = bound * (1.0 + tolerance) - measured;
        self.margin = Some(margin);
        self.outcome = if margin >= 0.0 { Outcome::Pass } else { Outcome::Fail };
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
