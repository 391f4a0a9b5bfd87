//! Named test Lagrangians.
//!
//! Velocity exponents are scaled with the order so the Hessian stays
//! non-degenerate at the velocity terminal: `(yⁱ)²` becomes
//! `2/Γ(2α+1) (yⁱ)^{2α}`, which keeps `g_ii = 1` for every `α`. At `α = 1`
//! every member reduces to its ordinary polynomial form.

use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::frac::{ChartSpec, FractionalOrder, PowerField};
use crate::lagrange::Lagrangian;
use crate::special::gamma;

/// Every corpus member, by name.
pub const NAMES: [&str; 6] = [
    "flat",
    "warped",
    "cross",
    "potential",
    "cubic-velocity",
    "constant-cross",
];

/// `Σ 2/Γ(2α+1) (yⁱ)^{2α}`: Hessian `δ_ij`.
pub fn flat(n: usize, alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(n)?);
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(square(&chart, i, alpha)?);
    }
    build(chart, terms, alpha)
}

/// `(1 + x¹)·2/Γ(2α+1) (y¹)^{2α}` in one dimension: Hessian `1 + x¹`.
pub fn warped(alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(1)?);
    let (c, e) = square(&chart, 0, alpha)?;
    let mut shifted = e.clone();
    shifted[0] = 1.0;
    build(chart, vec![(c, e), (c, shifted)], alpha)
}

/// Two-dimensional density with position–velocity cross terms:
/// `(1 + ½(x¹)²)(y¹)² + x² y¹y² + (y²)² + x¹ y² + (y¹)³/6` at `α = 1`, with
/// Hessian `[[1 + ½(x¹)² + ½(y¹)^α, ½x²], [½x², 1]]`.
pub fn cross(alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(2)?);
    let a = alpha.value();
    let (c2, _) = square(&chart, 0, alpha)?;
    let g1 = gamma(a + 1.0)?;
    let mut terms = vec![
        (c2, vec![0.0, 0.0, 2.0 * a, 0.0]),
        (0.5 * c2, vec![2.0, 0.0, 2.0 * a, 0.0]),
        (1.0 / (g1 * g1), vec![0.0, 1.0, a, a]),
        (c2, vec![0.0, 0.0, 0.0, 2.0 * a]),
        (1.0, vec![1.0, 0.0, 0.0, a]),
    ];
    // g_11 gains ½ (y¹)^α
    terms.push((g1 / gamma(3.0 * a + 1.0)?, vec![0.0, 0.0, 3.0 * a, 0.0]));
    build(chart, terms, alpha)
}

/// Flat kinetic part plus a position potential `x¹x² + ½(x¹)²`: the spray
/// is non-zero but the N-connection vanishes.
pub fn potential(alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(2)?);
    let mut terms = vec![square(&chart, 0, alpha)?, square(&chart, 1, alpha)?];
    terms.push((1.0, vec![1.0, 1.0, 0.0, 0.0]));
    terms.push((0.5, vec![2.0, 0.0, 0.0, 0.0]));
    build(chart, terms, alpha)
}

/// Position-free density with a velocity-dependent Hessian
/// `g = diag(1 + ½(y¹)^α, 1)`.
pub fn cubic_velocity(alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(2)?);
    let a = alpha.value();
    let mut terms = vec![square(&chart, 0, alpha)?, square(&chart, 1, alpha)?];
    terms.push((
        gamma(a + 1.0)? / gamma(3.0 * a + 1.0)?,
        vec![0.0, 0.0, 3.0 * a, 0.0],
    ));
    build(chart, terms, alpha)
}

/// Constant-coefficient quadratic `(y¹)² + y¹y² + 2(y²)²` (α-scaled).
pub fn constant_cross(alpha: FractionalOrder) -> Result<Lagrangian> {
    let chart = Arc::new(ChartSpec::origin(2)?);
    let a = alpha.value();
    let (c2, e1) = square(&chart, 0, alpha)?;
    let (_, e2) = square(&chart, 1, alpha)?;
    let g1 = gamma(a + 1.0)?;
    build(
        chart,
        vec![
            (c2, e1),
            (1.0 / (g1 * g1), vec![0.0, 0.0, a, a]),
            (2.0 * c2, e2),
        ],
        alpha,
    )
}

/// Look a member up by name; `flat` is two-dimensional.
pub fn by_name(name: &str, alpha: FractionalOrder) -> Result<Lagrangian> {
    match name {
        "flat" => flat(2, alpha),
        "warped" => warped(alpha),
        "cross" => cross(alpha),
        "potential" => potential(alpha),
        "cubic-velocity" => cubic_velocity(alpha),
        "constant-cross" => constant_cross(alpha),
        other => Err(GeoError::InvalidLagrangian(format!(
            "unknown corpus member '{other}'"
        ))),
    }
}

/// `(2/Γ(2α+1), exponents of (yⁱ)^{2α})`.
fn square(chart: &Arc<ChartSpec>, i: usize, alpha: FractionalOrder) -> Result<(f64, Vec<f64>)> {
    let a = alpha.value();
    let mut e = vec![0.0; chart.dim()];
    e[chart.y_axis(i)] = 2.0 * a;
    Ok((2.0 / gamma(2.0 * a + 1.0)?, e))
}

fn build(
    chart: Arc<ChartSpec>,
    terms: Vec<(f64, Vec<f64>)>,
    alpha: FractionalOrder,
) -> Result<Lagrangian> {
    Lagrangian::new(PowerField::from_terms(chart, terms)?, alpha, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrange::hessian_lower;

    #[test]
    fn scaled_squares_keep_unit_hessian() {
        for a in [0.25, 0.5, 0.75, 1.0] {
            let alpha = FractionalOrder::new(a).unwrap();
            let g = hessian_lower(&flat(2, alpha).unwrap()).unwrap();
            let p = [0.3, 0.4, 0.5, 0.6];
            assert!((g[0][0].eval(&p).unwrap() - 1.0).abs() < 1e-12);
            assert!(g[0][1].eval(&p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn cross_member_hessian() {
        for a in [0.5, 1.0] {
            let g = hessian_lower(&cross(FractionalOrder::new(a).unwrap()).unwrap()).unwrap();
            let p: [f64; 4] = [0.3, 0.4, 0.5, 0.6];
            assert!(
                (g[0][0].eval(&p).unwrap() - (1.0 + 0.045 + 0.5 * 0.5f64.powf(a))).abs() < 1e-12
            );
            assert!((g[0][1].eval(&p).unwrap() - 0.2).abs() < 1e-12);
            assert!((g[1][1].eval(&p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn capability_of_members() {
        let a = FractionalOrder::new(0.5).unwrap();
        for (name, capable) in [
            ("flat", true),
            ("warped", false),
            ("cross", false),
            ("potential", true),
            ("cubic-velocity", true),
            ("constant-cross", true),
        ] {
            assert_eq!(
                by_name(name, a).unwrap().is_symbolic_capable().unwrap(),
                capable,
                "{name}"
            );
        }
    }
}
