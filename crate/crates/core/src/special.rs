//! Gamma-function helpers for the Caputo power rule.

use crate::error::{GeoError, Result};

/// Euler gamma function. Non-positive integer arguments are rejected.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(GeoError::Domain(format!(
            "gamma of non-finite argument {x}"
        )));
    }
    if x <= 0.0 && x == x.round() {
        return Err(GeoError::Domain(format!("gamma pole at {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `Γ(p + 1) / Γ(p + 1 − α)`, the coefficient of the Caputo power rule.
///
/// At `α = 1` this is exactly `p`, so integer-limit derivatives stay
/// coefficient-exact.
pub fn power_rule_factor(p: f64, alpha: f64) -> Result<f64> {
    if p < 0.0 {
        return Err(GeoError::Domain(format!("negative exponent {p}")));
    }
    if alpha == 1.0 {
        return Ok(p);
    }
    let lower = p + 1.0 - alpha;
    if lower <= 0.0 && lower == lower.round() {
        return Err(GeoError::Domain(format!("gamma pole at {lower}")));
    }
    if p > 20.0 {
        // Γ overflows past ~171; the log form keeps the ratio finite.
        let ln =
            statrs::function::gamma::ln_gamma(p + 1.0) - statrs::function::gamma::ln_gamma(lower);
        return Ok(ln.exp());
    }
    Ok(gamma(p + 1.0)? / gamma(lower)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_reference_values() {
        let cases = [
            (0.5, PI.sqrt()),
            (1.5, PI.sqrt() / 2.0),
            (2.5, 0.75 * PI.sqrt()),
            (1.0, 1.0),
            (5.0, 24.0),
            (10.0, 362_880.0),
            (20.0, 121_645_100_408_832_000.0),
            (0.1, 9.513_507_698_668_732),
        ];
        for (x, want) in cases {
            let got = gamma(x).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn gamma_rejects_poles() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-3.0).is_err());
        assert!(gamma(-0.5).is_ok());
    }

    #[test]
    fn power_factor_limits() {
        assert_eq!(power_rule_factor(3.0, 1.0).unwrap(), 3.0);
        let half = power_rule_factor(1.0, 0.5).unwrap();
        assert!((half - 2.0 / PI.sqrt()).abs() < 1e-13);
        let big = power_rule_factor(40.0, 0.5).unwrap();
        let small_route = (statrs::function::gamma::ln_gamma(41.0)
            - statrs::function::gamma::ln_gamma(40.5))
        .exp();
        assert!((big - small_route).abs() / big < 1e-12);
        assert!(power_rule_factor(-1.0, 0.5).is_err());
    }
}
