//! Reference solutions: closed-form series, finite-difference solvers and
//! field error metrics.

mod analytic1d;
mod analytic2d;
mod erf;
mod fdm;
mod grid;

pub use analytic1d::{
    analytic_1d_approx, analytic_1d_series, transcendental_roots, Series1D, Series1DParams,
    DEFAULT_SERIES_TERMS,
};
pub use analytic2d::{analytic_2d, Analytic2DParams, DEFAULT_COSINE_TERMS};
pub use erf::{erf, erfc, erfcx, exp_erfc};
pub use fdm::{
    darcy_velocity_field, fdm_pressure, fdm_transport, solve_pressure, total_mass, Face, GridSpec,
    NodeBc, PressureBc, PressureSolution, strip_value, TransportBoundary, TransportOptions, TransportProblem,
    TransportSolution,
};
pub use grid::{mse, pointwise_error, GridField};
