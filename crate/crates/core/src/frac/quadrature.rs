//! Closed-form and discretised left Caputo derivatives on one axis.

use super::FractionalOrder;
use crate::error::{GeoError, Result};
use crate::special::{gamma, power_rule_factor};

/// Caputo derivative of `(x − x₁)^p` evaluated at `x_rel = x − x₁`.
pub fn caputo_power(p: f64, alpha: FractionalOrder, x_rel: f64) -> Result<f64> {
    if p < 0.0 {
        return Err(GeoError::Domain(format!("negative exponent {p}")));
    }
    if x_rel < 0.0 {
        return Err(GeoError::Domain(format!(
            "evaluation point {x_rel} precedes the terminal"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let e = p - alpha.value();
    if e < 0.0 && x_rel == 0.0 {
        return Err(GeoError::Singularity(format!(
            "exponent {e} at the terminal"
        )));
    }
    let factor = power_rule_factor(p, alpha.value())?;
    let power = if e == 0.0 { 1.0 } else { x_rel.powf(e) };
    Ok(factor * power)
}

/// Values of a function on the uniform grid `terminal = t₀ < … < t_{m−1} = end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLine {
    terminal: f64,
    end: f64,
    values: Vec<f64>,
}

impl SampledLine {
    pub fn new(terminal: f64, end: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(GeoError::InvalidLattice(format!(
                "need at least 3 samples, got {}",
                values.len()
            )));
        }
        if !(end > terminal) {
            return Err(GeoError::InvalidLattice(format!(
                "end {end} must exceed terminal {terminal}"
            )));
        }
        Ok(Self {
            terminal,
            end,
            values,
        })
    }

    pub fn from_fn(terminal: f64, end: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (end - terminal) / (points.max(2) - 1) as f64;
        let values = (0..points).map(|k| f(terminal + k as f64 * h)).collect();
        Self::new(terminal, end, values)
    }

    pub fn step(&self) -> f64 {
        (self.end - self.terminal) / (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    fn node_of(&self, at: f64) -> Result<usize> {
        let h = self.step();
        let off_grid = || GeoError::OffGrid {
            at,
            terminal: self.terminal,
            step: h,
        };
        if at < self.terminal - 1e-12 * h {
            return Err(off_grid());
        }
        let t = (at - self.terminal) / h;
        let k = t.round();
        if (t - k).abs() > 1e-8 || k as usize >= self.values.len() {
            return Err(off_grid());
        }
        Ok(k as usize)
    }
}

/// L1 approximation of the left Caputo derivative at a grid node.
///
/// `Σ_k w_k (f(t_{k+1}) − f(t_k))` with
/// `w_k = [(t − t_k)^{1−α} − (t − t_{k+1})^{1−α}] / (Γ(2−α) h)`.
/// At `α = 1` this is a one-sided first difference (forward at the terminal,
/// backward elsewhere).
pub fn caputo_quadrature(line: &SampledLine, alpha: FractionalOrder, at: f64) -> Result<f64> {
    let k = line.node_of(at)?;
    let f = line.values();
    let h = line.step();
    if alpha.is_integer() {
        return Ok(if k == 0 {
            (f[1] - f[0]) / h
        } else {
            (f[k] - f[k - 1]) / h
        });
    }
    let kernel = L1Kernel::new(alpha, f.len(), h)?;
    Ok(kernel.at(f, k))
}

/// Grünwald–Letnikov approximation of the left Riemann–Liouville derivative.
///
/// Reference only: unlike Caputo it does not annihilate constants.
pub fn rl_left_reference(line: &SampledLine, alpha: FractionalOrder, at: f64) -> Result<f64> {
    let k = line.node_of(at)?;
    let a = alpha.value();
    let f = line.values();
    let mut weight = 1.0;
    let mut acc = f[k];
    for r in 1..=k {
        weight *= 1.0 - (a + 1.0) / r as f64;
        acc += weight * f[k - r];
    }
    Ok(acc / line.step().powf(a))
}

/// Strategy for differentiating one lattice line in place of the Caputo
/// operator along that axis.
pub trait LineDerivative: Send + Sync {
    fn name(&self) -> &'static str;

    /// `out[k]` ≈ derivative at node `k` of the samples `f`.
    fn apply(&self, f: &[f64], out: &mut [f64]);
}

/// L1 product-integration kernel for `0 < α < 1` on a uniform line.
#[derive(Debug, Clone)]
pub struct L1Kernel {
    /// `a_r = r^{1−α} − (r−1)^{1−α}`, `r = 1..m−1`, index `r − 1`.
    increments: Vec<f64>,
    scale: f64,
}

impl L1Kernel {
    pub fn new(alpha: FractionalOrder, points: usize, step: f64) -> Result<Self> {
        let a = alpha.value();
        let beta = 1.0 - a;
        let increments = (1..points)
            .map(|r| (r as f64).powf(beta) - ((r - 1) as f64).powf(beta))
            .collect();
        let scale = step.powf(-a) / gamma(2.0 - a)?;
        Ok(Self { increments, scale })
    }

    fn at(&self, f: &[f64], k: usize) -> f64 {
        let mut acc = 0.0;
        for j in 0..k {
            acc += self.increments[k - j - 1] * (f[j + 1] - f[j]);
        }
        self.scale * acc
    }
}

impl LineDerivative for L1Kernel {
    fn name(&self) -> &'static str {
        "l1"
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        for k in 0..f.len() {
            out[k] = self.at(f, k);
        }
    }
}

/// Sixth-order (seven-point) finite-difference first derivative, shifted to
/// one-sided windows near the ends. Used for the integer limit `α = 1` on
/// lattices, where the L1 rule collapses to a first-order difference.
#[derive(Debug, Clone)]
pub struct StencilDerivative {
    width: usize,
    /// `weights[s]`: weights when the target sits at position `s` of the window.
    weights: Vec<Vec<f64>>,
}

impl StencilDerivative {
    pub const MAX_WIDTH: usize = 7;

    pub fn new(points: usize, step: f64) -> Self {
        let width = points.min(Self::MAX_WIDTH);
        let nodes: Vec<f64> = (0..width).map(|k| k as f64 * step).collect();
        let weights = (0..width)
            .map(|s| fornberg_first_derivative(nodes[s], &nodes))
            .collect();
        Self { width, weights }
    }
}

impl LineDerivative for StencilDerivative {
    fn name(&self) -> &'static str {
        "fd6"
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let m = f.len();
        let half = self.width / 2;
        for k in 0..m {
            let start = k.saturating_sub(half).min(m - self.width);
            let w = &self.weights[k - start];
            out[k] = w
                .iter()
                .zip(&f[start..start + self.width])
                .map(|(a, b)| a * b)
                .sum();
        }
    }
}

/// Fornberg's recursion, specialised to first-derivative weights at `z`.
fn fornberg_first_derivative(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    // c[j][k]: weight of x_j for the k-th derivative, k = 0, 1
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Scheme used on lattice lines: the seven-point stencil at `α = 1`, L1
/// otherwise.
pub fn line_derivative_for(
    alpha: FractionalOrder,
    points: usize,
    step: f64,
) -> Result<Box<dyn LineDerivative>> {
    if alpha.is_integer() {
        Ok(Box::new(StencilDerivative::new(points, step)))
    } else {
        Ok(Box::new(L1Kernel::new(alpha, points, step)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(caputo_power(0.0, order(0.5), 2.0).unwrap(), 0.0);
        assert_eq!(caputo_power(2.0, FractionalOrder::ONE, 3.0).unwrap(), 6.0);
        let v = caputo_power(1.0, order(0.5), 1.0).unwrap();
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-13);
    }

    #[test]
    fn closed_form_errors() {
        assert!(matches!(
            caputo_power(0.5, order(0.75), 0.0),
            Err(GeoError::Singularity(_))
        ));
        assert!(matches!(
            caputo_power(-1.0, order(0.5), 1.0),
            Err(GeoError::Domain(_))
        ));
    }

    #[test]
    fn quadrature_annihilates_constants() {
        let line = SampledLine::from_fn(0.0, 1.0, 65, |_| 7.0).unwrap();
        for k in [0.0, 0.5, 1.0] {
            assert!(caputo_quadrature(&line, order(0.5), k).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let line = SampledLine::from_fn(0.0, 1.0, 4096, |t| t).unwrap();
        let v = caputo_quadrature(&line, order(0.5), 1.0).unwrap();
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-4);
        let sq = SampledLine::from_fn(0.0, 1.0, 4096, |t| t * t).unwrap();
        assert!((caputo_quadrature(&sq, FractionalOrder::ONE, 1.0).unwrap() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn quadrature_rejects_off_grid_points() {
        let line = SampledLine::from_fn(0.0, 1.0, 11, |t| t).unwrap();
        assert!(matches!(
            caputo_quadrature(&line, order(0.5), 0.55),
            Err(GeoError::OffGrid { .. })
        ));
        assert!(caputo_quadrature(&line, order(0.5), -0.1).is_err());
        assert!(caputo_quadrature(&line, order(0.5), 1.1).is_err());
        assert!(SampledLine::new(0.0, 1.0, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn riemann_liouville_of_constant_does_not_vanish() {
        let a = order(0.5);
        let line = SampledLine::from_fn(0.0, 1.0, 2001, |_| 3.0).unwrap();
        let v = rl_left_reference(&line, a, 1.0).unwrap();
        let want = 3.0 / gamma(0.5).unwrap();
        assert!((v - want).abs() / want < 0.02);
    }

    #[test]
    fn riemann_liouville_examples() {
        let line = SampledLine::from_fn(0.0, 1.0, 4096, |t| t).unwrap();
        assert!((rl_left_reference(&line, FractionalOrder::ONE, 1.0).unwrap() - 1.0).abs() < 1e-3);
        assert!(
            (rl_left_reference(&line, order(0.5), 1.0).unwrap() - std::f64::consts::FRAC_2_SQRT_PI)
                .abs()
                < 1e-3
        );
    }

    #[test]
    fn stencil_exact_on_sextic() {
        let m = 20;
        let h = 0.1;
        let f: Vec<f64> = (0..m).map(|k| (k as f64 * h).powi(6)).collect();
        let mut out = vec![0.0; m];
        StencilDerivative::new(m, h).apply(&f, &mut out);
        for (k, d) in out.iter().enumerate() {
            let t = k as f64 * h;
            assert!((d - 6.0 * t.powi(5)).abs() < 1e-8, "node {k}: {d}");
        }
    }

    #[test]
    fn short_lines_use_every_point() {
        let f = [0.0, 1.0, 4.0];
        let mut out = [0.0; 3];
        StencilDerivative::new(3, 1.0).apply(&f, &mut out);
        assert!(
            (out[0] - 0.0).abs() < 1e-12
                && (out[1] - 2.0).abs() < 1e-12
                && (out[2] - 4.0).abs() < 1e-12
        );
    }
}
