use crate::error::{GeoError, Result};

/// Local chart `u = (x¹..xⁿ, y¹..yⁿ)` with the lower Caputo terminal of each
/// coordinate.
///
/// Axes are numbered `0..n` for `x` and `n..2n` for `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    n: usize,
    terminals_x: Vec<f64>,
    terminals_y: Vec<f64>,
}

impl ChartSpec {
    pub fn new(n: usize, terminals_x: Vec<f64>, terminals_y: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(GeoError::InvalidChart(
                "base dimension must be positive".into(),
            ));
        }
        if terminals_x.len() != n || terminals_y.len() != n {
            return Err(GeoError::InvalidChart(format!(
                "expected {n} terminals per family, got {} and {}",
                terminals_x.len(),
                terminals_y.len()
            )));
        }
        if terminals_x
            .iter()
            .chain(&terminals_y)
            .any(|t| !t.is_finite())
        {
            return Err(GeoError::InvalidChart("terminals must be finite".into()));
        }
        Ok(Self {
            n,
            terminals_x,
            terminals_y,
        })
    }

    /// Chart with every terminal at the origin.
    pub fn origin(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n], vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total dimension `2n` of the tangent bundle chart.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn terminals_x(&self) -> &[f64] {
        &self.terminals_x
    }

    pub fn terminals_y(&self) -> &[f64] {
        &self.terminals_y
    }

    pub fn terminal(&self, axis: usize) -> f64 {
        if axis < self.n {
            self.terminals_x[axis]
        } else {
            self.terminals_y[axis - self.n]
        }
    }

    pub fn x_axis(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    /// Axis of `yⁱ`; also the h/v index identification `i ↔ n + i`.
    pub fn y_axis(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        self.n + i
    }

    pub fn is_vertical(&self, axis: usize) -> bool {
        axis >= self.n
    }

    pub fn label(&self, axis: usize) -> String {
        if axis < self.n {
            format!("x{}", axis + 1)
        } else {
            format!("y{}", axis - self.n + 1)
        }
    }
}
