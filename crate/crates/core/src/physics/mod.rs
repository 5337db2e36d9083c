//! Governing equations of single-phase incompressible flow and solute
//! transport, expressed as residuals of network jets.
//!
//! Coordinates and fields are nondimensionalised as `x̂ = x/L_x`,
//! `ŷ = y/L_y`, `t̂ = t/T`, `Ĉ = C/C_scale` and
//! `P̂ = (P - P_min)/(P_max - P_min)`. Jet axes are `(x, t)` in 1D and
//! `(x, y, t)` in 2D.

mod params;
mod permeability;
mod residual;

pub use params::{dispersion, Normalization, TransportParams};
pub use permeability::{AnalyticField, GaussianLobe, PermeabilityField, RasterField};
pub use residual::{
    darcy_velocity, residual_ade_1d, residual_ade_2d, residual_ade_darcy, residual_pressure,
    AdeCoefficients, DarcyAdeResidual, PressureCoefficients,
};

/// Jet axis of `x` (both dimensionalities).
pub const AXIS_X: usize = 0;
/// Jet axis of `y` in 2D.
pub const AXIS_Y: usize = 1;

/// Jet axis of time for a problem with `spatial_dims` space dimensions.
pub const fn time_axis(spatial_dims: usize) -> usize {
    spatial_dims
}
