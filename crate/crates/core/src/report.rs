use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Named residuals with their tolerances and a verdict.
///
/// A residual passes iff it is strictly below its tolerance; the verdict is
/// pass iff every residual passes. Informational values (ranks, probe counts,
/// seeds) are kept apart and never affect the verdict.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    /// Per-residual tolerances that differ from `tolerance`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub passed: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    #[default]
    Pass,
    Fail,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        CheckReport { name: name.into(), tolerance, ..Default::default() }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        let tol = self.tolerance;
        self.push_with_tol(name, value, tol);
    }

    pub fn push_with_tol(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let name = name.into();
        if tol != self.tolerance {
            self.tolerances.insert(name.clone(), tol);
        } else {
            self.tolerances.remove(&name);
        }
        self.passed.insert(name.clone(), value < tol);
        self.residuals.insert(name, value);
        self.refresh();
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.info.insert(name.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Copies all residuals of `other` under `prefix.`; notes and info too.
    pub fn absorb(&mut self, prefix: &str, other: &CheckReport) {
        for (k, v) in &other.residuals {
            self.push_with_tol(format!("{prefix}.{k}"), *v, other.tolerance_of(k));
        }
        for (k, v) in &other.info {
            self.info(format!("{prefix}.{k}"), *v);
        }
        for n in &other.notes {
            self.note(format!("{prefix}: {n}"));
        }
    }

    pub fn tolerance_of(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(self.tolerance)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> Vec<&str> {
        self.passed.iter().filter(|(_, &ok)| !ok).map(|(k, _)| k.as_str()).collect()
    }

    fn refresh(&mut self) {
        self.verdict = if self.passed.values().all(|&ok| ok) { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
