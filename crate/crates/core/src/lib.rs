//! Physics-informed sine networks for solute transport in porous media.
//!
//! The crate is organised around five pieces:
//!
//! * [`net`]: fully connected networks with periodic (or tanh) activation,
//!   evaluated together with exact first and diagonal second input
//!   derivatives, and reverse-mode gradients of jet-based losses.
//! * [`physics`]: Darcy velocity, hydrodynamic dispersion and the
//!   nondimensional residuals of the pressure and advection-dispersion
//!   equations.
//! * [`training`]: collocation sampling, the weighted four-term loss and an
//!   L-BFGS minimiser with a strong-Wolfe line search.
//! * [`oracles`]: closed-form solutions, finite-difference reference solvers
//!   and error metrics.
//! * [`harness`]: case presets, configuration files, run orchestration,
//!   export and benchmarking.

pub mod error;
pub mod exec;
pub mod harness;
pub mod net;
pub mod oracles;
pub mod physics;
pub mod training;

pub use error::{Error, Result};
