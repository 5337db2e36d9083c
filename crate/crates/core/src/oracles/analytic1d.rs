//! Closed-form solutions of 1D advection–dispersion on `0 <= x <= L` with a
//! constant-concentration inlet at `x = 0`, a zero-gradient outlet at `x = L`
//! and a clean initial column.

use std::f64::consts::PI;

use super::erf::{erfc, exp_erfc};
use crate::{Error, Result};

/// Default cap on the number of series terms.
pub const DEFAULT_SERIES_TERMS: usize = 200;
/// A term whose bound drops below this fraction of `C0` ends the series.
const SERIES_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Series1DParams {
    pub length: f64,
    pub velocity: f64,
    pub dispersion: f64,
    pub c0: f64,
    pub n_terms: usize,
    pub root_tolerance: f64,
}

impl Series1DParams {
    pub fn new(length: f64, velocity: f64, dispersion: f64, c0: f64) -> Self {
        Self {
            length,
            velocity,
            dispersion,
            c0,
            n_terms: DEFAULT_SERIES_TERMS,
            root_tolerance: 1e-10,
        }
    }

    pub fn with_terms(mut self, n_terms: usize) -> Self {
        self.n_terms = n_terms;
        self
    }

    /// `u L / (2 D)`.
    pub fn peclet_half(&self) -> f64 {
        self.velocity * self.length / (2.0 * self.dispersion)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.dispersion > 0.0) {
            return Err(Error::Config("series needs L > 0 and D > 0".into()));
        }
        if self.n_terms == 0 {
            return Err(Error::Config("series needs at least one term".into()));
        }
        Ok(())
    }
}

/// The `n` smallest positive roots of `β cot β + h = 0`, one in each
/// interval `((i-1)π, iπ)`.
///
/// Each root is bisected to adjacent floating-point values; a root whose
/// residual exceeds both `tol` and the rounding floor `8 β² ε` is reported as
/// a numerical error.
pub fn transcendental_roots(h: f64, n: usize, tol: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Numerical(format!("root search needs h > 0, got {h}")));
    }
    let g = |b: f64| b / b.tan() + h;
    let mut roots = Vec::with_capacity(n);
    for i in 1..=n {
        let left = (i - 1) as f64 * PI;
        let right = i as f64 * PI;
        let delta = 1e-9 * right.max(1.0);
        let (mut lo, mut hi) = (left + delta, right - delta);
        let (g_lo, g_hi) = (g(lo), g(hi));
        if !(g_lo > 0.0 && g_hi < 0.0) {
            return Err(Error::Numerical(format!(
                "no sign change for root {i} of β cot β + {h}"
            )));
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = if g(lo).abs() < g(hi).abs() { lo } else { hi };
        let floor = 8.0 * root * root * f64::EPSILON;
        if g(root).abs() > tol.max(floor) {
            return Err(Error::Numerical(format!(
                "root {i} residual {:e} above tolerance",
                g(root)
            )));
        }
        roots.push(root);
    }
    Ok(roots)
}

/// Eigenfunction series for the finite column, with precomputed roots.
#[derive(Debug, Clone)]
pub struct Series1D {
    params: Series1DParams,
    roots: Vec<f64>,
}

impl Series1D {
    pub fn new(params: Series1DParams) -> Result<Self> {
        params.validate()?;
        let roots = transcendental_roots(params.peclet_half(), params.n_terms, params.root_tolerance)?;
        Ok(Self { params, roots })
    }

    pub fn params(&self) -> &Series1DParams {
        &self.params
    }

    /// Concentration at `(x, t)`. For `t <= 0` the initial state is returned,
    /// with the midpoint `C0/2` of the jump at the inlet corner.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let p = &self.params;
        if t <= 0.0 {
            return initial_state(x, p.c0);
        }
        let (l, u, d) = (p.length, p.velocity, p.dispersion);
        let h = p.peclet_half();
        let shift = x * u / (2.0 * d) - u * u * t / (4.0 * d);
        let mut sum = 0.0;
        for &beta in &self.roots {
            let weight = (shift - beta * beta * d * t / (l * l)).exp();
            let denom = beta * beta + h * h + h;
            sum += beta * (beta * x / l).sin() * weight / denom;
            if 2.0 * weight * beta / denom < SERIES_CUTOFF {
                break;
            }
        }
        p.c0 * (1.0 - 2.0 * sum)
    }
}

fn initial_state(x: f64, c0: f64) -> f64 {
    match x.partial_cmp(&0.0) {
        Some(std::cmp::Ordering::Less) => c0,
        Some(std::cmp::Ordering::Equal) => 0.5 * c0,
        _ => 0.0,
    }
}

/// Series solution at a single point. Builds the roots on every call; use
/// [`Series1D`] for repeated evaluation.
pub fn analytic_1d_series(x: f64, t: f64, params: &Series1DParams) -> Result<f64> {
    Ok(Series1D::new(params.clone())?.eval(x, t))
}

/// Four-term erfc approximation of the finite-column solution. For `t <= 0`
/// the initial state is returned, as in [`Series1D::eval`].
pub fn analytic_1d_approx(x: f64, t: f64, params: &Series1DParams) -> f64 {
    let (l, u, d, c0) = (params.length, params.velocity, params.dispersion, params.c0);
    if t <= 0.0 {
        return initial_state(x, c0);
    }
    let root = 2.0 * (d * t).sqrt();
    let far = 2.0 * l - x + u * t;
    let a = 0.5 * erfc((x - u * t) / root)
        + 0.5 * exp_erfc(u * x / d, (x + u * t) / root)
        + 0.5 * (2.0 + u * (2.0 * l - x) / d + u * u * t / d) * exp_erfc(u * l / d, far / root)
        - (u * u * t / (PI * d)).sqrt() * (u * l / d - far * far / (4.0 * d * t)).exp();
    c0 * a
}
