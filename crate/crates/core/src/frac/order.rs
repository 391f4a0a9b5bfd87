use std::fmt;

use crate::error::{GeoError, Result};

/// Order `α` of the left Caputo derivative, `0 < α ≤ 1`.
///
/// `α = 1` is the integer limit; every Caputo operator reduces to the
/// ordinary partial derivative there.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const ONE: FractionalOrder = FractionalOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(GeoError::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 == 1.0
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
