//! Fractional differential forms over the coordinate or N-adapted coframe.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{worse, ChartSpec, FractionalOrder, Lattice, PowerField, Scalar};
use crate::error::{GeoError, Result};

/// Highest form degree the pipeline needs (`dθ`, torsion and curvature stop
/// at three).
pub const MAX_DEGREE: usize = 3;

/// Which coframe the components refer to: `(du^β)^α`, or the N-adapted
/// `e^β = ((dx^j)^α, (dy^b)^α + N^b_k (dx^k)^α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Coordinate,
    Adapted,
}

/// Sorts a multi-index, returning the permutation sign, or `None` when an
/// index repeats (the wedge then vanishes).
pub fn sort_with_sign(indices: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut sorted = indices.to_vec();
    let mut sign = 1.0;
    // insertion sort, counting transpositions
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sign, sorted))
    }
}

/// A k-form with scalar-field coefficients, stored once per strictly
/// increasing index tuple.
#[derive(Debug, Clone)]
pub struct FormField {
    chart: Arc<ChartSpec>,
    degree: usize,
    basis: Basis,
    components: BTreeMap<Vec<usize>, Scalar>,
}

impl FormField {
    pub fn zero(chart: Arc<ChartSpec>, degree: usize, basis: Basis) -> Self {
        Self {
            chart,
            degree,
            basis,
            components: BTreeMap::new(),
        }
    }

    pub fn function(chart: Arc<ChartSpec>, value: Scalar, basis: Basis) -> Self {
        let mut form = Self::zero(chart, 0, basis);
        form.components.insert(Vec::new(), value);
        form.prune_zero(&[]);
        form
    }

    /// The basis covector with index `axis`.
    pub fn covector(chart: Arc<ChartSpec>, axis: usize, basis: Basis) -> Self {
        let one = PowerField::constant(chart.clone(), 1.0);
        let mut form = Self::zero(chart, 1, basis);
        form.components.insert(vec![axis], Scalar::Power(one));
        form
    }

    pub fn one_form(
        chart: Arc<ChartSpec>,
        basis: Basis,
        comps: Vec<(usize, Scalar)>,
    ) -> Result<Self> {
        let mut form = Self::zero(chart, 1, basis);
        for (axis, c) in comps {
            form.add_to(&[axis], &c)?;
        }
        Ok(form)
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Stored components, keyed by sorted index tuple.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.components.iter()
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    fn zero_scalar(&self) -> Scalar {
        Scalar::Power(PowerField::zero(self.chart.clone()))
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        if indices.len() != self.degree {
            return Err(GeoError::Degree(indices.len()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.chart.dim()) {
            return Err(GeoError::Domain(format!("form index {bad} out of range")));
        }
        Ok(())
    }

    /// Component for an arbitrary (possibly unsorted) index tuple, with the
    /// permutation sign applied.
    pub fn component(&self, indices: &[usize]) -> Result<Scalar> {
        self.check_indices(indices)?;
        match sort_with_sign(indices) {
            None => Ok(self.zero_scalar()),
            Some((sign, sorted)) => Ok(match self.components.get(&sorted) {
                Some(c) => c.scale(sign),
                None => self.zero_scalar(),
            }),
        }
    }

    /// Overwrite the component at `indices` (sign-adjusted to sorted order).
    pub fn set(&mut self, indices: &[usize], value: Scalar) -> Result<()> {
        self.check_indices(indices)?;
        let (sign, sorted) = sort_with_sign(indices)
            .ok_or_else(|| GeoError::Domain("repeated index in antisymmetric component".into()))?;
        self.components.insert(sorted.clone(), value.scale(sign));
        self.prune_zero(&sorted);
        Ok(())
    }

    /// Accumulate `value` into the component at `indices`; repeated indices
    /// contribute nothing.
    pub fn add_to(&mut self, indices: &[usize], value: &Scalar) -> Result<()> {
        self.check_indices(indices)?;
        let Some((sign, sorted)) = sort_with_sign(indices) else {
            return Ok(());
        };
        let signed = value.scale(sign);
        let next = match self.components.get(&sorted) {
            Some(existing) => existing.add(&signed)?,
            None => signed,
        };
        self.components.insert(sorted.clone(), next);
        self.prune_zero(&sorted);
        Ok(())
    }

    fn prune_zero(&mut self, key: &[usize]) {
        if self.components.get(key).is_some_and(Scalar::is_exact_zero) {
            self.components.remove(key);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(GeoError::BasisMismatch);
        }
        if *self.chart != *other.chart {
            return Err(GeoError::InvalidChart("forms on different charts".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(GeoError::Degree(other.degree));
        }
        let mut out = self.clone();
        for (idx, c) in &other.components {
            out.add_to(idx, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.chart.clone(), self.degree, self.basis);
        for (idx, c) in &self.components {
            out.components.insert(idx.clone(), c.scale(factor));
        }
        out
    }

    /// Multiply every component by a scalar field.
    pub fn mul_scalar(&self, f: &Scalar) -> Result<Self> {
        let mut out = Self::zero(self.chart.clone(), self.degree, self.basis);
        for (idx, c) in &self.components {
            let v = c.mul(f)?;
            out.components.insert(idx.clone(), v);
            out.prune_zero(idx);
        }
        Ok(out)
    }

    /// Largest absolute component value over the given lattice nodes.
    pub fn max_abs_over(&self, lattice: &Arc<Lattice>, nodes: &[usize]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in self.components.values() {
            worst = worse(worst, c.max_abs_over(lattice, nodes)?);
        }
        Ok(worst)
    }

    /// Evaluate a 2-form on two vectors (components in this form's basis) at a node.
    pub fn eval2_at(&self, lattice: &Lattice, node: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        if self.degree != 2 {
            return Err(GeoError::Degree(self.degree));
        }
        let mut acc = 0.0;
        for (idx, c) in &self.components {
            let (i, j) = (idx[0], idx[1]);
            acc += c.value_at(lattice, node)? * (x[i] * y[j] - x[j] * y[i]);
        }
        Ok(acc)
    }
}

/// Graded-antisymmetric wedge product.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    a.check_compatible(b)?;
    let degree = a.degree + b.degree;
    if degree > MAX_DEGREE {
        return Err(GeoError::Degree(degree));
    }
    let mut out = FormField::zero(a.chart.clone(), degree, a.basis);
    for (ia, ca) in &a.components {
        for (ib, cb) in &b.components {
            if ia.iter().any(|i| ib.contains(i)) {
                continue;
            }
            let joined: Vec<usize> = ia.iter().chain(ib).copied().collect();
            out.add_to(&joined, &ca.mul(cb)?)?;
        }
    }
    Ok(out)
}

/// Fractional exterior derivative in the coordinate cobasis:
/// `d(f du^I) = Σ_γ ∂̲_γ f (du^γ)^α ∧ du^I`.
pub fn exterior_derivative(form: &FormField, alpha: FractionalOrder) -> Result<FormField> {
    if form.basis != Basis::Coordinate {
        return Err(GeoError::BasisMismatch);
    }
    if form.degree >= MAX_DEGREE {
        return Err(GeoError::Degree(form.degree + 1));
    }
    let dim = form.chart.dim();
    let mut out = FormField::zero(form.chart.clone(), form.degree + 1, Basis::Coordinate);
    for (idx, c) in &form.components {
        for axis in 0..dim {
            if idx.contains(&axis) {
                continue;
            }
            let deriv = c.caputo(axis, alpha)?;
            if deriv.is_exact_zero() {
                continue;
            }
            let mut joined = Vec::with_capacity(idx.len() + 1);
            joined.push(axis);
            joined.extend_from_slice(idx);
            out.add_to(&joined, &deriv)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::GridField;

    fn chart(n: usize) -> Arc<ChartSpec> {
        Arc::new(ChartSpec::origin(n).unwrap())
    }

    fn coeff(f: &FormField, idx: &[usize]) -> f64 {
        match f.component(idx).unwrap() {
            Scalar::Power(p) => p.eval(&vec![0.5; f.chart.dim()]).unwrap(),
            Scalar::Grid(_) => panic!("expected symbolic"),
        }
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((1.0, vec![0, 1, 2])));
        assert_eq!(sort_with_sign(&[1, 0]), Some((-1.0, vec![0, 1])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn wedge_examples() {
        let c = chart(2);
        let e = |a| FormField::covector(c.clone(), a, Basis::Adapted);
        assert!(wedge(&e(0), &e(0)).unwrap().components().next().is_none());
        let e12 = wedge(&e(0), &e(1)).unwrap();
        assert_eq!(coeff(&e12, &[0, 1]), 1.0);
        assert_eq!(coeff(&e12, &[1, 0]), -1.0);
        let e123 = wedge(&e12, &e(2)).unwrap();
        assert_eq!(coeff(&e123, &[0, 1, 2]), 1.0);
        assert!(wedge(&e123, &e(3)).is_err());
        let mixed = FormField::covector(c.clone(), 1, Basis::Coordinate);
        assert!(matches!(wedge(&e(0), &mixed), Err(GeoError::BasisMismatch)));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let c = chart(1);
        let f = FormField::function(
            c.clone(),
            PowerField::constant(c, 4.0).into(),
            Basis::Coordinate,
        );
        let d = exterior_derivative(&f, FractionalOrder::new(0.5).unwrap()).unwrap();
        assert_eq!(d.degree(), 1);
        assert!(d.components().next().is_none());
    }

    #[test]
    fn derivative_of_one_form_sign() {
        // ω = f(x²) dx¹ → dω = ∂₂f dx²∧dx¹ = −∂₂f dx¹∧dx²
        let c = chart(2);
        let f = PowerField::monomial(c.clone(), 1.0, vec![0.0, 3.0, 0.0, 0.0]).unwrap();
        let omega =
            FormField::one_form(c.clone(), Basis::Coordinate, vec![(0, f.clone().into())]).unwrap();
        let alpha = FractionalOrder::new(0.5).unwrap();
        let d = exterior_derivative(&omega, alpha).unwrap();
        let want = f.caputo(1, alpha).unwrap().scale(-1.0);
        match d.component(&[0, 1]).unwrap() {
            Scalar::Power(p) => assert!(p.sub(&want).max_abs_coeff() < 1e-15),
            _ => panic!(),
        }
        assert_eq!(d.components().count(), 1);
    }

    #[test]
    fn degree_three_input_rejected() {
        let c = chart(2);
        let e = |a| FormField::covector(c.clone(), a, Basis::Coordinate);
        let three = wedge(&wedge(&e(0), &e(1)).unwrap(), &e(2)).unwrap();
        assert!(exterior_derivative(&three, FractionalOrder::ONE).is_err());
        let adapted = FormField::covector(c.clone(), 0, Basis::Adapted);
        assert!(exterior_derivative(&adapted, FractionalOrder::ONE).is_err());
    }

    #[test]
    fn grid_components_mix_with_symbolic() {
        let c = chart(1);
        let lat = Arc::new(Lattice::uniform(c.clone(), 1.0, 9).unwrap());
        let g = GridField::from_fn(lat.clone(), |u| u[0] + u[1]);
        let mut f = FormField::zero(c.clone(), 1, Basis::Coordinate);
        f.add_to(&[0], &g.into()).unwrap();
        f.add_to(&[0], &PowerField::constant(c, 1.0).into())
            .unwrap();
        let node = lat.node(&[4, 4]);
        let v = f.component(&[0]).unwrap().value_at(&lat, node).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
