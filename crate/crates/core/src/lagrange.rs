//! Regular Lagrangians, their Hessian d-metric, the semi-spray and the
//! Euler–Lagrange residual of sampled curves.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::frac::{
    caputo_quadrature, worse, ChartSpec, FractionalOrder, GridField, Lattice, PowerField,
    SampledLine, Scalar,
};

/// Default lower bound on `|det g|` over the lattice.
pub const DEFAULT_REGULARITY_TOLERANCE: f64 = 1e-8;

/// A Lagrange density `L(x, y)` on the chart together with the order of the
/// Caputo calculus it is differentiated with.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    density: PowerField,
    alpha: FractionalOrder,
    finsler: bool,
}

impl Lagrangian {
    pub fn new(density: PowerField, alpha: FractionalOrder, finsler: bool) -> Result<Self> {
        let chart = density.chart().clone();
        if !(0..chart.n()).any(|i| density.depends_on(chart.y_axis(i))) {
            return Err(GeoError::InvalidLagrangian(
                "L does not depend on any velocity coordinate".into(),
            ));
        }
        Ok(Self {
            density,
            alpha,
            finsler,
        })
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        self.density.chart()
    }

    pub fn n(&self) -> usize {
        self.chart().n()
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn density(&self) -> &PowerField {
        &self.density
    }

    pub fn is_finsler(&self) -> bool {
        self.finsler
    }

    /// Same density differentiated with another order.
    pub fn with_alpha(&self, alpha: FractionalOrder) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }

    /// `∂̲_{axis} L` (symbolic).
    pub fn partial(&self, axis: usize) -> Result<PowerField> {
        self.density.caputo(axis, self.alpha)
    }

    /// True when the canonical N-connection vanishes identically for this
    /// density: either `L` has no position dependence, or it splits into a
    /// velocity part and a position part with constant Hessian. Only then do
    /// the fractional closure identities reduce to exact symbolic ones.
    pub fn is_symbolic_capable(&self) -> Result<bool> {
        let chart = self.chart();
        let n = chart.n();
        let depends_on_x = |f: &PowerField| (0..n).any(|i| f.depends_on(chart.x_axis(i)));
        let depends_on_y = |f: &PowerField| (0..n).any(|i| f.depends_on(chart.y_axis(i)));
        if !depends_on_x(&self.density) {
            return Ok(true);
        }
        let separated = self.density.terms().all(|m| {
            let single = PowerField::monomial(chart.clone(), 1.0, m.exponents.clone());
            single
                .map(|f| !(depends_on_x(&f) && depends_on_y(&f)))
                .unwrap_or(false)
        });
        if !separated {
            return Ok(false);
        }
        let g = hessian_lower(self)?;
        Ok(g.iter()
            .flatten()
            .all(|gij| !depends_on_x(gij) && !depends_on_y(gij)))
    }

    /// `Σ yⁱ ∂̲_{yⁱ} L − 2L`, the Euler residual of 2-homogeneity.
    pub fn euler_homogeneity_defect(&self) -> Result<PowerField> {
        let chart = self.chart();
        let mut acc = self.density.scale(-2.0);
        for i in 0..self.n() {
            let y = PowerField::coordinate(chart.clone(), chart.y_axis(i));
            acc = acc.add(&y.mul(&self.partial(chart.y_axis(i))?));
        }
        Ok(acc)
    }
}

/// Symmetrised Hessian `g_ij = ¼(∂̲_{yⁱ}∂̲_{yʲ} + ∂̲_{yʲ}∂̲_{yⁱ}) L`.
pub fn hessian_lower(lag: &Lagrangian) -> Result<Vec<Vec<PowerField>>> {
    let chart = lag.chart();
    let n = lag.n();
    let alpha = lag.alpha();
    let first: Vec<PowerField> = (0..n)
        .map(|i| lag.partial(chart.y_axis(i)))
        .collect::<Result<_>>()?;
    let mut g = vec![vec![PowerField::zero(chart.clone()); n]; n];
    for i in 0..n {
        for j in i..n {
            let ij = first[j].caputo(chart.y_axis(i), alpha)?;
            let ji = first[i].caputo(chart.y_axis(j), alpha)?;
            let gij = ij.add(&ji).scale(0.25);
            g[j][i] = gij.clone();
            g[i][j] = gij;
        }
    }
    Ok(g)
}

/// Hessian d-metric with its lattice inverse.
#[derive(Debug, Clone)]
pub struct HessianMetric {
    lattice: Arc<Lattice>,
    lower: Vec<Vec<PowerField>>,
    lower_grid: Vec<Vec<GridField>>,
    upper: Vec<Vec<GridField>>,
    det_min: f64,
    inverse_residual: f64,
}

impl HessianMetric {
    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn lower(&self, i: usize, j: usize) -> &PowerField {
        &self.lower[i][j]
    }

    pub fn lower_scalar(&self, i: usize, j: usize) -> Scalar {
        Scalar::Power(self.lower[i][j].clone())
    }

    pub fn lower_grid(&self, i: usize, j: usize) -> &GridField {
        &self.lower_grid[i][j]
    }

    pub fn upper(&self, i: usize, j: usize) -> &GridField {
        &self.upper[i][j]
    }

    /// Minimum `|det g|` over every lattice node.
    pub fn det_min(&self) -> f64 {
        self.det_min
    }

    /// `max ‖g⁻¹g − I‖` over every lattice node.
    pub fn inverse_residual(&self) -> f64 {
        self.inverse_residual
    }

    /// Largest coefficient of `g_ij − g_ji` (zero by construction).
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worse(
                    worst,
                    self.lower[i][j].sub(&self.lower[j][i]).max_abs_coeff(),
                );
            }
        }
        worst
    }

    /// Lower metric at one node as a matrix.
    pub fn lower_at(&self, node: usize) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.lower_grid[i][j].get(node))
    }
}

pub fn hessian_metric(lag: &Lagrangian, lattice: &Arc<Lattice>) -> Result<HessianMetric> {
    hessian_metric_with_tolerance(lag, lattice, DEFAULT_REGULARITY_TOLERANCE)
}

/// Hessian metric; fails with [`GeoError::Regularity`] when `|det g|` drops
/// below `tolerance` anywhere on the lattice.
pub fn hessian_metric_with_tolerance(
    lag: &Lagrangian,
    lattice: &Arc<Lattice>,
    tolerance: f64,
) -> Result<HessianMetric> {
    let n = lag.n();
    let lower = hessian_lower(lag)?;
    let mut lower_grid: Vec<Vec<GridField>> = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            let g = if j < i {
                lower_grid[j][i].clone()
            } else {
                lower[i][j].sample(lattice)?
            };
            lower_grid[i].push(g);
        }
    }
    let len = lattice.node_count();
    let mut upper_vals = vec![vec![0.0; len]; n * n];
    let mut det_min = f64::INFINITY;
    let mut inverse_residual: f64 = 0.0;
    for node in 0..len {
        let g = DMatrix::from_fn(n, n, |i, j| lower_grid[i][j].get(node));
        let det = g.determinant();
        det_min = det_min.min(det.abs());
        if det.abs() < tolerance {
            continue;
        }
        let inv = g.clone().try_inverse().ok_or(GeoError::Regularity {
            min_det: det.abs(),
            tolerance,
        })?;
        let defect = (&inv * &g - DMatrix::identity(n, n)).amax();
        inverse_residual = worse(inverse_residual, defect);
        for i in 0..n {
            for j in 0..n {
                upper_vals[i * n + j][node] = inv[(i, j)];
            }
        }
    }
    if !(det_min >= tolerance) {
        return Err(GeoError::Regularity {
            min_det: det_min,
            tolerance,
        });
    }
    let mut upper: Vec<Vec<GridField>> = vec![Vec::with_capacity(n); n];
    for (k, vals) in upper_vals.into_iter().enumerate() {
        upper[k / n].push(GridField::from_values(lattice.clone(), vals)?);
    }
    Ok(HessianMetric {
        lattice: lattice.clone(),
        lower,
        lower_grid,
        upper,
        det_min,
        inverse_residual,
    })
}

/// `bracket_j = Σ_i yⁱ ∂̲_{yʲ}∂̲_{xⁱ} L − ∂̲_{xʲ} L`, the symbolic factor of the
/// semi-spray.
pub fn spray_brackets(lag: &Lagrangian) -> Result<Vec<PowerField>> {
    let chart = lag.chart();
    let n = lag.n();
    let alpha = lag.alpha();
    let dx: Vec<PowerField> = (0..n)
        .map(|i| lag.partial(chart.x_axis(i)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut b = dx[j].scale(-1.0);
        for (i, dxi) in dx.iter().enumerate() {
            let y = PowerField::coordinate(chart.clone(), chart.y_axis(i));
            b = b.add(&y.mul(&dxi.caputo(chart.y_axis(j), alpha)?));
        }
        out.push(b);
    }
    Ok(out)
}

/// Semi-spray coefficients `Gᵏ = ¼ g^{kj} bracket_j`.
#[derive(Debug, Clone)]
pub struct SemiSpray {
    lower: Vec<Vec<PowerField>>,
    brackets: Vec<PowerField>,
    coeffs: Vec<Scalar>,
}

impl SemiSpray {
    /// Spray for pointwise evaluation only (no lattice coefficients), usable
    /// where the lattice metric is not regular everywhere.
    pub fn pointwise(lag: &Lagrangian) -> Result<Self> {
        Ok(Self {
            lower: hessian_lower(lag)?,
            brackets: spray_brackets(lag)?,
            coeffs: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    /// Lattice coefficient `Gᵏ`. Panics for a pointwise-only spray.
    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn brackets(&self) -> &[PowerField] {
        &self.brackets
    }

    /// `Gᵏ` at an arbitrary chart point, inverting the symbolic Hessian there.
    pub fn eval_at(&self, point: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let b: Vec<f64> = self
            .brackets
            .iter()
            .map(|f| f.eval(point))
            .collect::<Result<_>>()?;
        if b.iter().all(|v| *v == 0.0) {
            return Ok(vec![0.0; n]);
        }
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.lower[i][j].eval(point)?;
            }
        }
        let inv = g
            .try_inverse()
            .ok_or_else(|| GeoError::Singularity(format!("Hessian not invertible at {point:?}")))?;
        Ok((0..n)
            .map(|k| 0.25 * (0..n).map(|j| inv[(k, j)] * b[j]).sum::<f64>())
            .collect())
    }
}

/// Semi-spray of `lag`, contracted node-wise with the lattice inverse metric.
pub fn semi_spray(lag: &Lagrangian, metric: &HessianMetric) -> Result<SemiSpray> {
    let brackets = spray_brackets(lag)?;
    let coeffs = contract_spray(
        metric,
        &brackets
            .iter()
            .cloned()
            .map(Scalar::Power)
            .collect::<Vec<_>>(),
    )?;
    Ok(SemiSpray {
        lower: metric.lower.clone(),
        brackets,
        coeffs,
    })
}

/// `¼ g^{kj} b_j` for arbitrary bracket fields.
pub fn contract_spray(metric: &HessianMetric, brackets: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = metric.n();
    let chart = metric.lattice.chart().clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Scalar::zero(chart.clone());
        for (j, b) in brackets.iter().enumerate() {
            if b.is_exact_zero() {
                continue;
            }
            acc = acc.add(&Scalar::Grid(metric.upper[k][j].clone()).mul(b)?)?;
        }
        out.push(acc.scale(0.25));
    }
    Ok(out)
}

/// Hessian from lattice derivatives of the sampled density, independent of
/// the power rule.
pub fn grid_hessian(lag: &Lagrangian, lattice: &Arc<Lattice>) -> Result<Vec<Vec<GridField>>> {
    let chart = lag.chart();
    let n = lag.n();
    let alpha = lag.alpha();
    let l = lag.density().sample(lattice)?;
    let first: Vec<GridField> = (0..n)
        .map(|i| l.caputo_partial(chart.y_axis(i), alpha))
        .collect::<Result<_>>()?;
    let mut g: Vec<Vec<GridField>> = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            let gij = if j < i {
                g[j][i].clone()
            } else {
                let ij = first[j].caputo_partial(chart.y_axis(i), alpha)?;
                let ji = first[i].caputo_partial(chart.y_axis(j), alpha)?;
                ij.add(&ji)?.scale(0.25)
            };
            g[i].push(gij);
        }
    }
    Ok(g)
}

/// Semi-spray from lattice derivatives of the sampled density and a
/// node-wise inverse of [`grid_hessian`]. Nodes with a singular lattice
/// Hessian yield NaN.
pub fn grid_spray(lag: &Lagrangian, lattice: &Arc<Lattice>) -> Result<Vec<GridField>> {
    let n = lag.n();
    let g = grid_hessian(lag, lattice)?;
    let brackets = grid_spray_brackets(lag, lattice)?;
    let len = lattice.node_count();
    let mut out = vec![vec![0.0; len]; n];
    for node in 0..len {
        let m = DMatrix::from_fn(n, n, |i, j| g[i][j].get(node));
        match m.try_inverse() {
            Some(inv) => {
                for (k, row) in out.iter_mut().enumerate() {
                    row[node] = 0.25
                        * (0..n)
                            .map(|j| inv[(k, j)] * brackets[j].get(node))
                            .sum::<f64>();
                }
            }
            None => out.iter_mut().for_each(|row| row[node] = f64::NAN),
        }
    }
    out.into_iter()
        .map(|v| GridField::from_values(lattice.clone(), v))
        .collect()
}

/// [`spray_brackets`] from lattice derivatives of the sampled density.
pub fn grid_spray_brackets(lag: &Lagrangian, lattice: &Arc<Lattice>) -> Result<Vec<GridField>> {
    let chart = lag.chart();
    let n = lag.n();
    let alpha = lag.alpha();
    let l = lag.density().sample(lattice)?;
    let dx: Vec<GridField> = (0..n)
        .map(|i| l.caputo_partial(chart.x_axis(i), alpha))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::with_capacity(n);
    for j in 0..n {
        let mut b = dx[j].scale(-1.0);
        for (i, dxi) in dx.iter().enumerate() {
            let y = PowerField::coordinate(chart.clone(), chart.y_axis(i)).sample(lattice)?;
            b = b.add(&y.mul(&dxi.caputo_partial(chart.y_axis(j), alpha)?)?)?;
        }
        brackets.push(b);
    }
    Ok(brackets)
}

/// A base curve `x(τ)` sampled on a uniform τ-grid starting at its terminal.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    terminal: f64,
    end: f64,
    components: Vec<Vec<f64>>,
}

impl SampledCurve {
    pub fn new(terminal: f64, end: f64, components: Vec<Vec<f64>>) -> Result<Self> {
        let m = components.first().map_or(0, Vec::len);
        if components.is_empty() || components.iter().any(|c| c.len() != m) {
            return Err(GeoError::Domain(
                "curve components must be non-empty and equally long".into(),
            ));
        }
        SampledLine::new(terminal, end, components[0].clone())?;
        Ok(Self {
            terminal,
            end,
            components,
        })
    }

    pub fn from_fn(
        terminal: f64,
        end: f64,
        points: usize,
        n: usize,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let h = (end - terminal) / (points.max(2) - 1) as f64;
        let mut components = vec![Vec::with_capacity(points); n];
        for k in 0..points {
            let x = f(terminal + k as f64 * h);
            for (c, v) in components.iter_mut().zip(x) {
                c.push(v);
            }
        }
        Self::new(terminal, end, components)
    }

    pub fn len(&self) -> usize {
        self.components[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn node_time(&self, k: usize) -> f64 {
        self.terminal + k as f64 * (self.end - self.terminal) / (self.len() - 1) as f64
    }
}

/// `max |(∂̲_τ)² xᵏ + 2Gᵏ(x, y)|` over the samples, with `y = ∂̲_τ x` and both
/// τ-derivatives taken by the one-dimensional quadrature.
pub fn euler_lagrange_residual(
    lag: &Lagrangian,
    curve: &SampledCurve,
    spray: &SemiSpray,
) -> Result<f64> {
    let n = lag.n();
    if curve.components.len() != n {
        return Err(GeoError::Domain(format!(
            "curve has {} components, expected {n}",
            curve.components.len()
        )));
    }
    let alpha = lag.alpha();
    let m = curve.len();
    let mut velocity = vec![vec![0.0; m]; n];
    let mut accel = vec![vec![0.0; m]; n];
    for i in 0..n {
        let line = SampledLine::new(curve.terminal, curve.end, curve.components[i].clone())?;
        for k in 0..m {
            velocity[i][k] = caputo_quadrature(&line, alpha, curve.node_time(k))?;
        }
        let vline = SampledLine::new(curve.terminal, curve.end, velocity[i].clone())?;
        for k in 0..m {
            accel[i][k] = caputo_quadrature(&vline, alpha, curve.node_time(k))?;
        }
    }
    let chart = lag.chart();
    let mut worst: f64 = 0.0;
    for k in 0..m {
        let mut point = Vec::with_capacity(2 * n);
        point.extend((0..n).map(|i| curve.components[i][k]));
        point.extend((0..n).map(|i| velocity[i][k]));
        for (axis, &u) in point.iter().enumerate() {
            if u < chart.terminal(axis) {
                return Err(GeoError::OutsideChart {
                    sample: k,
                    detail: format!(
                        "{} = {u} below terminal {}",
                        chart.label(axis),
                        chart.terminal(axis)
                    ),
                });
            }
        }
        let g = spray.eval_at(&point).map_err(|e| GeoError::OutsideChart {
            sample: k,
            detail: e.to_string(),
        })?;
        for i in 0..n {
            worst = worse(worst, (accel[i][k] + 2.0 * g[i]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(n: usize) -> Arc<ChartSpec> {
        Arc::new(ChartSpec::origin(n).unwrap())
    }

    fn lag(c: &Arc<ChartSpec>, terms: Vec<(f64, Vec<f64>)>, alpha: f64) -> Lagrangian {
        let l = PowerField::from_terms(c.clone(), terms).unwrap();
        Lagrangian::new(l, FractionalOrder::new(alpha).unwrap(), false).unwrap()
    }

    #[test]
    fn flat_quadratic_has_identity_metric() {
        let c = chart(2);
        let l = lag(
            &c,
            vec![(1.0, vec![0., 0., 2., 0.]), (1.0, vec![0., 0., 0., 2.])],
            1.0,
        );
        let g = hessian_lower(&l).unwrap();
        let p = [0.3, 0.2, 0.7, 0.1];
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g[i][j].eval(&p).unwrap(), want);
            }
        }
    }

    #[test]
    fn fractional_square_metric_is_linear_in_velocity() {
        let c = chart(1);
        let l = lag(&c, vec![(1.0, vec![0., 2.])], 0.5);
        let g = &hessian_lower(&l).unwrap()[0][0];
        // two power-rule steps: Γ(3)/Γ(2.5) · Γ(2.5)/Γ(2) = 2, halved
        let terms: Vec<_> = g.terms().collect();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].coeff - 1.0).abs() < 1e-12);
        assert!((terms[0].exponents[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn position_only_density_rejected() {
        let c = chart(1);
        let l = PowerField::monomial(c, 1.0, vec![2.0, 0.0]).unwrap();
        assert!(matches!(
            Lagrangian::new(l, FractionalOrder::ONE, false),
            Err(GeoError::InvalidLagrangian(_))
        ));
    }

    #[test]
    fn degenerate_hessian_is_irregular() {
        let c = chart(2);
        let l = lag(&c, vec![(1.0, vec![1., 0., 1., 0.])], 1.0);
        let lat = Arc::new(Lattice::uniform(c, 1.0, 5).unwrap());
        assert!(matches!(
            hessian_metric(&l, &lat),
            Err(GeoError::Regularity { .. })
        ));
    }

    #[test]
    fn warped_spray_matches_hand_value() {
        let c = chart(1);
        let l = lag(&c, vec![(1.0, vec![0., 2.]), (1.0, vec![1., 2.])], 1.0);
        let lat = Arc::new(Lattice::uniform(c, 1.0, 9).unwrap());
        let g = hessian_metric(&l, &lat).unwrap();
        assert!(g.inverse_residual() < 1e-12);
        let s = semi_spray(&l, &g).unwrap();
        for node in 0..lat.node_count() {
            let u = lat.coords(node);
            let want = u[1] * u[1] / (4.0 * (1.0 + u[0]));
            assert!((s.coeff(0).value_at(&lat, node).unwrap() - want).abs() < 1e-12);
            assert!((s.eval_at(&u).unwrap()[0] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_only_density_has_no_spray() {
        let c = chart(2);
        let l = lag(
            &c,
            vec![(1.0, vec![0., 0., 1.5, 0.]), (2.0, vec![0., 0., 0.5, 1.0])],
            0.5,
        );
        assert!(spray_brackets(&l).unwrap().iter().all(PowerField::is_zero));
        assert!(l.is_symbolic_capable().unwrap());
    }

    #[test]
    fn capability_classification() {
        let c = chart(1);
        let split = lag(&c, vec![(1.0, vec![0., 2.]), (1.0, vec![3., 0.])], 1.0);
        assert!(split.is_symbolic_capable().unwrap());
        let warped = lag(&c, vec![(1.0, vec![1., 2.])], 1.0);
        assert!(!warped.is_symbolic_capable().unwrap());
        let cubic = lag(&c, vec![(1.0, vec![0., 3.]), (1.0, vec![1., 0.])], 1.0);
        assert!(!cubic.is_symbolic_capable().unwrap());
    }

    #[test]
    fn euler_lagrange_on_lines_and_rest_points() {
        let c = chart(2);
        let flat = lag(
            &c,
            vec![(1.0, vec![0., 0., 2., 0.]), (1.0, vec![0., 0., 0., 2.])],
            1.0,
        );
        let lat = Arc::new(Lattice::uniform(c.clone(), 1.0, 5).unwrap());
        let s = semi_spray(&flat, &hessian_metric(&flat, &lat).unwrap()).unwrap();
        let line = SampledCurve::from_fn(0.0, 1.0, 33, 2, |t| vec![0.5 * t, 0.25 * t]).unwrap();
        assert!(euler_lagrange_residual(&flat, &line, &s).unwrap() <= 1e-6);

        let c1 = chart(1);
        let warped = lag(&c1, vec![(1.0, vec![0., 2.]), (1.0, vec![1., 2.])], 1.0);
        let lat1 = Arc::new(Lattice::uniform(c1, 1.0, 5).unwrap());
        let sw = semi_spray(&warped, &hessian_metric(&warped, &lat1).unwrap()).unwrap();
        let line1 = SampledCurve::from_fn(0.0, 1.0, 33, 1, |t| vec![0.5 * t]).unwrap();
        let r = euler_lagrange_residual(&warped, &line1, &sw).unwrap();
        // |2G| = y²/(2(1+x)) at the curve start
        assert!((r - 0.125).abs() < 1e-9, "{r}");

        for a in [0.5, 1.0] {
            let l = warped.with_alpha(FractionalOrder::new(a).unwrap());
            let s = SemiSpray::pointwise(&l).unwrap();
            let rest = SampledCurve::from_fn(0.0, 1.0, 17, 1, |_| vec![0.3]).unwrap();
            assert!(euler_lagrange_residual(&l, &rest, &s).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn curve_below_terminal_is_reported() {
        let c = chart(1);
        let l = lag(&c, vec![(1.0, vec![0., 2.])], 1.0);
        let lat = Arc::new(Lattice::uniform(c, 1.0, 5).unwrap());
        let s = semi_spray(&l, &hessian_metric(&l, &lat).unwrap()).unwrap();
        let down = SampledCurve::from_fn(0.0, 1.0, 9, 1, |t| vec![1.0 - t]).unwrap();
        assert!(matches!(
            euler_lagrange_residual(&l, &down, &s),
            Err(GeoError::OutsideChart { .. })
        ));
    }

    #[test]
    fn lattice_route_agrees_at_integer_order() {
        let c = chart(1);
        let l = lag(
            &c,
            vec![
                (1.0, vec![0., 2.]),
                (1.0, vec![1., 2.]),
                (0.5, vec![2., 0.]),
            ],
            1.0,
        );
        let lat = Arc::new(Lattice::uniform(c, 1.0, 16).unwrap());
        let g = hessian_metric(&l, &lat).unwrap();
        let s = semi_spray(&l, &g).unwrap();
        let gg = grid_hessian(&l, &lat).unwrap();
        assert!(gg[0][0].sub(g.lower_grid(0, 0)).unwrap().max_abs() < 1e-10);
        let gs = grid_spray(&l, &lat).unwrap();
        let sym = s.coeff(0).to_grid(&lat).unwrap();
        assert!(gs[0].sub(&sym).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn homogeneity_defect_of_quadratic_vanishes() {
        let c = chart(2);
        let f2 = lag(
            &c,
            vec![(1.0, vec![0., 0., 2., 0.]), (3.0, vec![1., 0., 1., 1.])],
            1.0,
        );
        assert!(f2.euler_homogeneity_defect().unwrap().max_abs_coeff() < 1e-12);
        let not = lag(&c, vec![(1.0, vec![0., 0., 3., 0.])], 1.0);
        assert!(not.euler_homogeneity_defect().unwrap().max_abs_coeff() > 0.1);
    }
}
