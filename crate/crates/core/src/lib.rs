//! Canonical geometry of regular Lagrangians under left Caputo derivatives:
//! Hessian d-metric, semi-spray, canonical N-connection, adapted frames,
//! the canonical metrical d-connection with its torsion and curvature, and
//! the induced almost Kähler structure, each paired with numerical
//! residual checks.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod dconn;
pub mod error;
pub mod frac;
pub mod kahler;
pub mod lagrange;
pub mod nconn;
pub mod pipeline;
pub mod special;

pub use error::{GeoError, Result};
