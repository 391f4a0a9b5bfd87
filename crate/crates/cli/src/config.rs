//! Job configuration: parsing and validation.

use std::path::Path;
use std::sync::Arc;

use frakgeo_core::frac::{ChartSpec, FractionalOrder, Lattice, PowerField};
use frakgeo_core::lagrange::{Lagrangian, DEFAULT_REGULARITY_TOLERANCE};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::CheckRegistry;

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_POINTS: usize = 16;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alphas {
    One(f64),
    Many(Vec<f64>),
}

impl Alphas {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Alphas::One(a) => vec![*a],
            Alphas::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Terminals {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coeff: f64,
    pub x_exponents: Vec<f64>,
    pub y_exponents: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub upper_bound: f64,
    pub points: usize,
}

/// One spec for every axis, or one per axis (`x¹..xⁿ` then `y¹..yⁿ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Uniform(AxisSpec),
    PerAxis(Vec<AxisSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Algebraic identities and exact (symbolic) paths.
    #[serde(default = "default_symbolic")]
    pub symbolic: f64,
    /// Lattice-derivative checks at the integer order.
    #[serde(default = "default_grid")]
    pub grid: f64,
    /// Lattice-derivative checks at fractional orders.
    #[serde(default = "default_fractional")]
    pub fractional: f64,
    /// Lower bound on `|det g|`.
    #[serde(default = "default_regularity")]
    pub regularity: f64,
}

fn default_symbolic() -> f64 {
    1e-6
}
fn default_grid() -> f64 {
    1e-4
}
fn default_fractional() -> f64 {
    5e-3
}
fn default_regularity() -> f64 {
    DEFAULT_REGULARITY_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symbolic: default_symbolic(),
            grid: default_grid(),
            fractional: default_fractional(),
            regularity: default_regularity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub dimension: usize,
    pub alpha: Alphas,
    #[serde(default)]
    pub terminals: Option<Terminals>,
    pub lagrangian: Vec<MonomialSpec>,
    #[serde(default)]
    pub finsler: bool,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// A validated job, ready to run.
#[derive(Debug, Clone)]
pub struct Job {
    pub chart: Arc<ChartSpec>,
    pub lattice: Arc<Lattice>,
    pub density: PowerField,
    pub alphas: Vec<FractionalOrder>,
    pub finsler: bool,
    pub tolerances: Tolerances,
    pub checks: Vec<String>,
    pub seed: u64,
}

impl Job {
    pub fn lagrangian(&self, alpha: FractionalOrder) -> Lagrangian {
        Lagrangian::new(self.density.clone(), alpha, self.finsler).expect("density validated")
    }
}

impl JobConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self, registry: &CheckRegistry) -> Result<Job, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let n = self.dimension;
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let (tx, ty) = match &self.terminals {
            Some(t) => (t.x.clone(), t.y.clone()),
            None => (vec![0.0; n], vec![0.0; n]),
        };
        let chart = Arc::new(ChartSpec::new(n, tx, ty).map_err(|e| invalid(e.to_string()))?);

        let axes: Vec<AxisSpec> = match &self.lattice {
            LatticeSpec::Uniform(a) => vec![*a; 2 * n],
            LatticeSpec::PerAxis(v) => v.clone(),
        };
        if axes.len() != 2 * n {
            return Err(invalid(format!(
                "lattice needs {} axes, got {}",
                2 * n,
                axes.len()
            )));
        }
        for (axis, spec) in axes.iter().enumerate() {
            if spec.points < MIN_POINTS {
                return Err(invalid(format!(
                    "axis {} has {} points, need at least {MIN_POINTS}",
                    chart.label(axis),
                    spec.points
                )));
            }
            if !(spec.upper_bound > chart.terminal(axis)) {
                return Err(invalid(format!(
                    "axis {}: upper_bound {} must exceed terminal {}",
                    chart.label(axis),
                    spec.upper_bound,
                    chart.terminal(axis)
                )));
            }
        }
        let bounds: Vec<(f64, usize)> = axes.iter().map(|a| (a.upper_bound, a.points)).collect();
        let lattice =
            Arc::new(Lattice::new(chart.clone(), &bounds).map_err(|e| invalid(e.to_string()))?);

        if self.lagrangian.is_empty() {
            return Err(invalid("lagrangian has no terms"));
        }
        let mut terms = Vec::with_capacity(self.lagrangian.len());
        for (k, m) in self.lagrangian.iter().enumerate() {
            if m.x_exponents.len() != n || m.y_exponents.len() != n {
                return Err(invalid(format!(
                    "lagrangian term {k}: exponent arrays must have length {n}"
                )));
            }
            let exps: Vec<f64> = m
                .x_exponents
                .iter()
                .chain(&m.y_exponents)
                .copied()
                .collect();
            terms.push((m.coeff, exps));
        }
        let density =
            PowerField::from_terms(chart.clone(), terms).map_err(|e| invalid(e.to_string()))?;

        let raw = self.alpha.values();
        if raw.is_empty() {
            return Err(invalid("alpha list is empty"));
        }
        let alphas = raw
            .into_iter()
            .map(FractionalOrder::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(e.to_string()))?;
        // rejects densities without velocity dependence
        Lagrangian::new(density.clone(), alphas[0], self.finsler)
            .map_err(|e| invalid(e.to_string()))?;

        let t = &self.tolerances;
        if [t.symbolic, t.grid, t.fractional, t.regularity]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(invalid("tolerances must be finite and non-negative"));
        }

        let checks = match &self.checks {
            None => registry.names().map(str::to_string).collect(),
            Some(list) => {
                for name in list {
                    if registry.get(name).is_none() {
                        return Err(invalid(format!("unknown check '{name}'")));
                    }
                }
                // keep registry (dependency) order
                registry
                    .names()
                    .filter(|n| list.iter().any(|l| l == n))
                    .map(str::to_string)
                    .collect()
            }
        };

        Ok(Job {
            chart,
            lattice,
            density,
            alphas,
            finsler: self.finsler,
            tolerances: *t,
            checks,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"{
        "dimension": 1,
        "alpha": 1.0,
        "lagrangian": [{"coeff": 1.0, "x_exponents": [0], "y_exponents": [2]}],
        "lattice": {"upper_bound": 1.0, "points": 16}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = JobConfig::from_json(FLAT).unwrap();
        let job = cfg.validate(&CheckRegistry::default()).unwrap();
        assert_eq!(job.seed, 42);
        assert_eq!(job.checks.len(), CheckRegistry::default().names().count());
        assert_eq!(job.lattice.node_count(), 256);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = FLAT.replace("\"dimension\"", "\"colour\": 1, \"dimension\"");
        assert!(matches!(
            JobConfig::from_json(&bad),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn validation_errors() {
        let reg = CheckRegistry::default();
        for (from, to) in [
            ("\"points\": 16", "\"points\": 8"),
            ("\"upper_bound\": 1.0", "\"upper_bound\": -1.0"),
            ("\"y_exponents\": [2]", "\"y_exponents\": [2, 0]"),
            ("\"y_exponents\": [2]", "\"y_exponents\": [0]"),
            ("\"alpha\": 1.0", "\"alpha\": 1.5"),
        ] {
            let cfg = JobConfig::from_json(&FLAT.replace(from, to)).unwrap();
            assert!(
                matches!(cfg.validate(&reg), Err(ConfigError::Invalid(_))),
                "{to}"
            );
        }
        let unknown = FLAT.replace("\"dimension\"", "\"checks\": [\"nope\"], \"dimension\"");
        assert!(JobConfig::from_json(&unknown)
            .unwrap()
            .validate(&reg)
            .is_err());
    }
}
