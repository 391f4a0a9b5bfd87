//! Symbolic shifted-power fields.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{ChartSpec, FractionalOrder, GridField, Lattice};
use crate::error::{GeoError, Result};
use crate::special::power_rule_factor;

/// Exponents are merged on a 1e-9 grid so that `2 − α − α` and `2 − 2α`
/// land on the same monomial.
const EXPONENT_TICKS: f64 = 1e9;

fn exponent_key(exponents: &[f64]) -> Vec<i64> {
    exponents
        .iter()
        .map(|e| (e * EXPONENT_TICKS).round() as i64)
        .collect()
}

/// One term `coeff · Π (u^β − terminal^β)^{exponents[β]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<f64>,
}

/// Finite sum of shifted-power monomials in `(x, y)`.
///
/// The set is closed under left Caputo derivatives with terminals at the
/// shift points, which is what makes it the exact carrier for `L`, `ω`, `θ`
/// and the Hessian. Canonical form: equal exponent vectors are merged and
/// exactly-zero coefficients pruned.
#[derive(Clone, PartialEq)]
pub struct PowerField {
    chart: Arc<ChartSpec>,
    terms: BTreeMap<Vec<i64>, Monomial>,
}

impl PowerField {
    pub fn zero(chart: Arc<ChartSpec>) -> Self {
        Self {
            chart,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: Arc<ChartSpec>, value: f64) -> Self {
        let dim = chart.dim();
        let mut field = Self::zero(chart);
        field.insert(value, vec![0.0; dim]);
        field
    }

    /// Single monomial; exponents must be finite and non-negative.
    pub fn monomial(chart: Arc<ChartSpec>, coeff: f64, exponents: Vec<f64>) -> Result<Self> {
        Self::from_terms(chart, [(coeff, exponents)])
    }

    pub fn from_terms<I>(chart: Arc<ChartSpec>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<f64>)>,
    {
        let dim = chart.dim();
        let mut field = Self::zero(chart);
        for (coeff, exponents) in terms {
            if exponents.len() != dim {
                return Err(GeoError::Domain(format!(
                    "monomial has {} exponents, chart needs {dim}",
                    exponents.len()
                )));
            }
            if !coeff.is_finite() {
                return Err(GeoError::Domain(format!("non-finite coefficient {coeff}")));
            }
            if let Some(bad) = exponents.iter().find(|e| !e.is_finite() || **e < 0.0) {
                return Err(GeoError::Domain(format!(
                    "exponent {bad} must be finite and >= 0"
                )));
            }
            field.insert(coeff, exponents);
        }
        Ok(field)
    }

    /// The coordinate function `u^axis` itself, i.e. `(u − t) + t`.
    pub fn coordinate(chart: Arc<ChartSpec>, axis: usize) -> Self {
        let dim = chart.dim();
        let terminal = chart.terminal(axis);
        let mut exps = vec![0.0; dim];
        exps[axis] = 1.0;
        let mut field = Self::zero(chart);
        field.insert(1.0, exps);
        field.insert(terminal, vec![0.0; dim]);
        field
    }

    fn insert(&mut self, coeff: f64, exponents: Vec<f64>) {
        if coeff == 0.0 {
            return;
        }
        let key = exponent_key(&exponents);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                existing.coeff += coeff;
                if existing.coeff == 0.0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, Monomial { coeff, exponents });
            }
        }
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.values()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact zero in canonical form.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|m| m.coeff.abs())
            .fold(0.0, f64::max)
    }

    /// True when Caputo differentiation left a negative exponent, so the
    /// field blows up on some terminal hyperplane.
    pub fn is_singular_at_terminal(&self) -> bool {
        self.terms
            .values()
            .any(|m| m.exponents.iter().any(|e| *e < 0.0))
    }

    pub fn depends_on(&self, axis: usize) -> bool {
        self.terms.values().any(|m| m.exponents[axis] != 0.0)
    }

    fn assert_same_chart(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart,
            "power fields on different charts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_chart(other);
        let mut out = self.clone();
        for m in other.terms.values() {
            out.insert(m.coeff, m.exponents.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.chart.clone());
        for m in self.terms.values() {
            out.insert(m.coeff * factor, m.exponents.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_chart(other);
        let mut out = Self::zero(self.chart.clone());
        for a in self.terms.values() {
            for b in other.terms.values() {
                let exps = a
                    .exponents
                    .iter()
                    .zip(&b.exponents)
                    .map(|(p, q)| p + q)
                    .collect();
                out.insert(a.coeff * b.coeff, exps);
            }
        }
        out
    }

    /// Left Caputo partial derivative along `axis` by the power rule.
    ///
    /// Constant-in-axis monomials vanish; a monomial with a negative exponent
    /// on `axis` has no Caputo derivative and is a domain error.
    pub fn caputo(&self, axis: usize, alpha: FractionalOrder) -> Result<Self> {
        let a = alpha.value();
        let mut out = Self::zero(self.chart.clone());
        for m in self.terms.values() {
            let p = m.exponents[axis];
            if p == 0.0 {
                continue;
            }
            if p < 0.0 {
                return Err(GeoError::Domain(format!(
                    "Caputo derivative along {} of negative power {p}",
                    self.chart.label(axis)
                )));
            }
            let factor = power_rule_factor(p, a)?;
            let mut exps = m.exponents.clone();
            exps[axis] = if a == 1.0 { p - 1.0 } else { p - a };
            out.insert(m.coeff * factor, exps);
        }
        Ok(out)
    }

    /// Evaluate at a chart point `u` (length `2n`).
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for m in self.terms.values() {
            let mut term = m.coeff;
            for (axis, (&e, &u)) in m.exponents.iter().zip(point).enumerate() {
                term *= shifted_power(u - self.chart.terminal(axis), e, || self.chart.label(axis))?;
            }
            total += term;
        }
        Ok(total)
    }

    /// Sample on every lattice node.
    pub fn sample(&self, lattice: &Arc<Lattice>) -> Result<GridField> {
        if **lattice.chart() != *self.chart {
            return Err(GeoError::LatticeMismatch);
        }
        let dim = self.chart.dim();
        let len = lattice.node_count();
        let mut values = vec![0.0; len];
        for m in self.terms.values() {
            // per-axis power tables keep the node loop to multiplications
            let mut tables: Vec<(usize, Vec<f64>)> = Vec::new();
            for axis in 0..dim {
                let e = m.exponents[axis];
                if e == 0.0 {
                    continue;
                }
                let grid = lattice.axis(axis);
                let mut table = Vec::with_capacity(grid.points());
                for k in 0..grid.points() {
                    let rel = grid.coord(k) - grid.start();
                    table.push(shifted_power(rel, e, || self.chart.label(axis))?);
                }
                tables.push((axis, table));
            }
            if tables.is_empty() {
                values.iter_mut().for_each(|v| *v += m.coeff);
                continue;
            }
            let strides: Vec<usize> = tables.iter().map(|(a, _)| lattice.stride(*a)).collect();
            let counts: Vec<usize> = tables
                .iter()
                .map(|(a, _)| lattice.axis(*a).points())
                .collect();
            for (node, v) in values.iter_mut().enumerate() {
                let mut term = m.coeff;
                for ((_, table), (&s, &c)) in tables.iter().zip(strides.iter().zip(&counts)) {
                    term *= table[(node / s) % c];
                }
                *v += term;
            }
        }
        GridField::from_values(lattice.clone(), values)
    }
}

fn shifted_power(rel: f64, e: f64, label: impl Fn() -> String) -> Result<f64> {
    if e == 0.0 {
        return Ok(1.0);
    }
    if rel < 0.0 {
        return Err(GeoError::Domain(format!("{} below its terminal", label())));
    }
    if rel == 0.0 {
        if e < 0.0 {
            return Err(GeoError::Singularity(format!(
                "{}^{e} at its terminal",
                label()
            )));
        }
        return Ok(0.0);
    }
    if e == 1.0 {
        return Ok(rel);
    }
    if e == 2.0 {
        return Ok(rel * rel);
    }
    Ok(rel.powf(e))
}

impl fmt::Debug for PowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerField({self})")
    }
}

impl fmt::Display for PowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.terms.values().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coeff)?;
            for (axis, e) in m.exponents.iter().enumerate() {
                if *e != 0.0 {
                    write!(f, "·{}^{}", self.chart.label(axis), e)?;
                }
            }
        }
        Ok(())
    }
}
