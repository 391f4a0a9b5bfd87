use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular at terminal: {0}")]
    Singularity(String),

    #[error("point {at} is not a lattice node (terminal {terminal}, step {step})")]
    OffGrid { at: f64, terminal: f64, step: f64 },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("form basis mismatch")]
    BasisMismatch,

    #[error("form degree {0} not supported here")]
    Degree(usize),

    #[error("Lagrangian is not regular: min |det g| = {min_det:e} below tolerance {tolerance:e}")]
    Regularity { min_det: f64, tolerance: f64 },

    #[error("invalid Lagrangian: {0}")]
    InvalidLagrangian(String),

    #[error("curve leaves the chart domain at sample {sample}: {detail}")]
    OutsideChart { sample: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, GeoError>;
