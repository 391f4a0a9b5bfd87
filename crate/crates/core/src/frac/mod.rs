//! Left Caputo calculus: closed-form power rule, lattice quadrature, and the
//! exterior calculus of fractional forms.

mod chart;
mod forms;
mod grid;
mod lattice;
mod order;
mod power;
mod quadrature;
mod scalar;

pub use chart::ChartSpec;
pub use forms::{exterior_derivative, sort_with_sign, wedge, Basis, FormField, MAX_DEGREE};
pub use grid::{worse, GridField};
pub use lattice::{AxisGrid, Lattice};
pub use order::FractionalOrder;
pub use power::{Monomial, PowerField};
pub use quadrature::{
    caputo_power, caputo_quadrature, line_derivative_for, rl_left_reference, L1Kernel,
    LineDerivative, SampledLine, StencilDerivative,
};
pub use scalar::Scalar;

/// Caputo partial of a symbolic field along one axis.
pub fn caputo_partial_power(
    field: &PowerField,
    axis: usize,
    alpha: FractionalOrder,
) -> error::Result<PowerField> {
    field.caputo(axis, alpha)
}

/// Caputo partial of a lattice field along one axis.
pub fn caputo_partial_grid(
    field: &GridField,
    axis: usize,
    alpha: FractionalOrder,
) -> error::Result<GridField> {
    field.caputo_partial(axis, alpha)
}

use crate::error;
