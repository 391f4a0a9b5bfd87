use std::sync::Arc;

use super::{ChartSpec, FractionalOrder, GridField, Lattice, PowerField};
use crate::error::Result;

/// A scalar field in either representation. Arithmetic stays symbolic while
/// both operands are symbolic and falls back to the lattice otherwise.
#[derive(Debug, Clone)]
pub enum Scalar {
    Power(PowerField),
    Grid(GridField),
}

impl Scalar {
    pub fn zero(chart: Arc<ChartSpec>) -> Scalar {
        Scalar::Power(PowerField::zero(chart))
    }

    pub fn constant(chart: Arc<ChartSpec>, value: f64) -> Scalar {
        Scalar::Power(PowerField::constant(chart, value))
    }

    /// Sum of several fields, starting from an exact zero.
    pub fn sum<'a>(
        chart: &Arc<ChartSpec>,
        terms: impl IntoIterator<Item = &'a Scalar>,
    ) -> Result<Scalar> {
        let mut acc = Scalar::zero(chart.clone());
        for t in terms {
            acc = acc.add(t)?;
        }
        Ok(acc)
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Scalar::Power(p) if p.is_zero())
    }

    pub fn to_grid(&self, lattice: &Arc<Lattice>) -> Result<GridField> {
        match self {
            Scalar::Power(p) => p.sample(lattice),
            Scalar::Grid(g) => Ok(g.clone()),
        }
    }

    fn lift(a: &Scalar, b: &Scalar) -> Result<Option<(GridField, GridField)>> {
        let lat = match (a, b) {
            (Scalar::Grid(g), _) | (_, Scalar::Grid(g)) => g.lattice().clone(),
            _ => return Ok(None),
        };
        Ok(Some((a.to_grid(&lat)?, b.to_grid(&lat)?)))
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        if self.is_exact_zero() {
            return Ok(other.clone());
        }
        if other.is_exact_zero() {
            return Ok(self.clone());
        }
        match Self::lift(self, other)? {
            None => match (self, other) {
                (Scalar::Power(a), Scalar::Power(b)) => Ok(Scalar::Power(a.add(b))),
                _ => unreachable!(),
            },
            Some((a, b)) => Ok(Scalar::Grid(a.add(&b)?)),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        if self.is_exact_zero() || other.is_exact_zero() {
            let chart = match (self, other) {
                (Scalar::Power(p), _) | (_, Scalar::Power(p)) => p.chart().clone(),
                _ => unreachable!(),
            };
            return Ok(Scalar::Power(PowerField::zero(chart)));
        }
        match Self::lift(self, other)? {
            None => match (self, other) {
                (Scalar::Power(a), Scalar::Power(b)) => Ok(Scalar::Power(a.mul(b))),
                _ => unreachable!(),
            },
            Some((a, b)) => Ok(Scalar::Grid(a.mul(&b)?)),
        }
    }

    pub fn scale(&self, factor: f64) -> Scalar {
        match self {
            Scalar::Power(p) => Scalar::Power(p.scale(factor)),
            Scalar::Grid(g) => Scalar::Grid(g.scale(factor)),
        }
    }

    /// Caputo partial derivative: power rule when symbolic, lattice
    /// quadrature otherwise.
    pub fn caputo(&self, axis: usize, alpha: FractionalOrder) -> Result<Scalar> {
        match self {
            Scalar::Power(p) => Ok(Scalar::Power(p.caputo(axis, alpha)?)),
            Scalar::Grid(g) => Ok(Scalar::Grid(g.caputo_partial(axis, alpha)?)),
        }
    }

    pub fn max_abs_over(&self, lattice: &Arc<Lattice>, nodes: &[usize]) -> Result<f64> {
        if self.is_exact_zero() {
            return Ok(0.0);
        }
        Ok(self.to_grid(lattice)?.max_abs_over(nodes))
    }

    pub fn value_at(&self, lattice: &Lattice, node: usize) -> Result<f64> {
        match self {
            Scalar::Power(p) => p.eval(&lattice.coords(node)),
            Scalar::Grid(g) => Ok(g.get(node)),
        }
    }
}

impl From<PowerField> for Scalar {
    fn from(p: PowerField) -> Self {
        Scalar::Power(p)
    }
}

impl From<GridField> for Scalar {
    fn from(g: GridField) -> Self {
        Scalar::Grid(g)
    }
}
