//! Lattice-sampled scalar fields.

use std::sync::Arc;

use super::quadrature::line_derivative_for;
use super::{FractionalOrder, Lattice};
use crate::error::{GeoError, Result};

/// Scalar field sampled on every node of a terminal-anchored lattice.
///
/// Carrier for objects without a closed form (inverse metric, spray,
/// N-connection, connection coefficients).
#[derive(Debug, Clone)]
pub struct GridField {
    lattice: Arc<Lattice>,
    values: Arc<[f64]>,
}

impl GridField {
    pub fn from_values(lattice: Arc<Lattice>, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.node_count() {
            return Err(GeoError::InvalidLattice(format!(
                "{} values for {} nodes",
                values.len(),
                lattice.node_count()
            )));
        }
        Ok(Self {
            lattice,
            values: values.into(),
        })
    }

    pub fn from_fn(lattice: Arc<Lattice>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values: Vec<f64> = (0..lattice.node_count())
            .map(|node| f(&lattice.coords(node)))
            .collect();
        Self {
            lattice,
            values: values.into(),
        }
    }

    pub fn constant(lattice: Arc<Lattice>, value: f64) -> Self {
        let values = vec![value; lattice.node_count()];
        Self {
            lattice,
            values: values.into(),
        }
    }

    pub fn zeros(lattice: Arc<Lattice>) -> Self {
        Self::constant(lattice, 0.0)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Self {
            lattice: self.lattice.clone(),
            values: values.into(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_lattice(other) {
            return Err(GeoError::LatticeMismatch);
        }
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            lattice: self.lattice.clone(),
            values: values.into(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// `self + factor · other`, the workhorse of index contractions.
    pub fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + factor * b)
    }

    /// `Σ_k a_k · b_k` over node-wise products.
    pub fn dot(lattice: &Arc<Lattice>, pairs: &[(&GridField, &GridField)]) -> Result<Self> {
        let mut acc = vec![0.0; lattice.node_count()];
        for (a, b) in pairs {
            if !(a.lattice.as_ref() == lattice.as_ref() && b.lattice.as_ref() == lattice.as_ref()) {
                return Err(GeoError::LatticeMismatch);
            }
            for ((s, x), y) in acc.iter_mut().zip(a.values.iter()).zip(b.values.iter()) {
                *s += x * y;
            }
        }
        GridField::from_values(lattice.clone(), acc)
    }

    /// Caputo partial derivative along `axis`, line by line from the
    /// terminal. Output lives on the same lattice.
    pub fn caputo_partial(&self, axis: usize, alpha: FractionalOrder) -> Result<Self> {
        let grid = self.lattice.axis(axis);
        let m = grid.points();
        let scheme = line_derivative_for(alpha, m, grid.step())?;
        let stride = self.lattice.stride(axis);
        let block = stride * m;
        let mut out = vec![0.0; self.values.len()];
        let mut line = vec![0.0; m];
        let mut deriv = vec![0.0; m];
        for base in (0..self.values.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = self.values[start + k * stride];
                }
                scheme.apply(&line, &mut deriv);
                for (k, d) in deriv.iter().enumerate() {
                    out[start + k * stride] = *d;
                }
            }
        }
        GridField::from_values(self.lattice.clone(), out)
    }

    /// Multilinear interpolation at an arbitrary chart point inside the lattice.
    pub fn interpolate(&self, point: &[f64]) -> Result<f64> {
        let (cell, frac) = self.lattice.locate(point)?;
        let dim = cell.len();
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut weight = 1.0;
            let mut node = 0;
            for a in 0..dim {
                let up = (corner >> a) & 1 == 1;
                weight *= if up { frac[a] } else { 1.0 - frac[a] };
                node += (cell[a] + usize::from(up)) * self.lattice.stride(a);
            }
            if weight != 0.0 {
                acc += weight * self.values[node];
            }
        }
        Ok(acc)
    }

    /// Largest magnitude; NaN if any value is NaN.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| worse(m, v.abs()))
    }

    /// Largest magnitude over `nodes`; NaN if any of them is NaN.
    pub fn max_abs_over(&self, nodes: &[usize]) -> f64 {
        nodes
            .iter()
            .fold(0.0, |m, &n| worse(m, self.values[n].abs()))
    }
}

/// `max` that lets NaN win, so an undefined residual is never hidden.
pub fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
