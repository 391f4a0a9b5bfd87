//! Verification report model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

/// How a residual above tolerance is graded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Always a hard failure.
    Hard,
    /// Downgraded to a warning at fractional order.
    SoftWhenFractional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub alpha: f64,
    /// `None` when the check could not be evaluated.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub node_count: usize,
    pub detail: String,
}

impl CheckRecord {
    pub fn measured(
        name: impl Into<String>,
        alpha: f64,
        residual: f64,
        tolerance: f64,
        severity: Severity,
        node_count: usize,
        detail: impl Into<String>,
    ) -> Self {
        let within = residual <= tolerance;
        let verdict = match (within, severity) {
            (true, _) => Verdict::Pass,
            (false, Severity::SoftWhenFractional) if alpha < 1.0 && residual.is_finite() => {
                Verdict::Warn
            }
            (false, _) => Verdict::Fail,
        };
        Self {
            name: name.into(),
            alpha,
            max_residual: Some(round_sig(residual, 6)),
            tolerance,
            verdict,
            node_count,
            detail: detail.into(),
        }
    }

    pub fn failed(
        name: impl Into<String>,
        alpha: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            alpha,
            max_residual: None,
            tolerance,
            verdict: Verdict::Fail,
            node_count: 0,
            detail: detail.into(),
        }
    }
}

/// Round to `digits` significant digits; non-finite values pass through.
pub fn round_sig(value: f64, digits: usize) -> f64 {
    if !value.is_finite() || value == 0.0 {
        return value;
    }
    format!("{:.*e}", digits - 1, value)
        .parse()
        .unwrap_or(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub axis: String,
    pub terminal: f64,
    pub upper_bound: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRun {
    pub alpha: f64,
    pub det_g_min: Option<f64>,
    pub symbolic_capable: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub warn: usize,
    pub fail: usize,
}

/// Run-dependent data kept apart so the rest of the report is reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub generated_at_unix: u64,
    /// Seconds per `alpha/check` key.
    pub wall_time_s: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub version: String,
    pub seed: u64,
    pub lattice: Vec<AxisReport>,
    pub runs: Vec<AlphaRun>,
    pub summary: Summary,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn new(seed: u64, lattice: Vec<AxisReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            lattice,
            runs: Vec::new(),
            summary: Summary::default(),
            timing: Timing::default(),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &CheckRecord> {
        self.runs.iter().flat_map(|r| r.checks.iter())
    }

    pub fn tally(&mut self) {
        let mut s = Summary::default();
        for r in self.runs.iter().flat_map(|r| r.checks.iter()) {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Warn => s.warn += 1,
                Verdict::Fail => s.fail += 1,
            }
        }
        self.summary = s;
    }

    pub fn has_failures(&self) -> bool {
        self.records().any(|r| r.verdict == Verdict::Fail)
    }

    /// The report without its timing section, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
