//! Cosine-series solution of 2D advection–dispersion with a uniform flow
//! along x, an injection strip `y1 <= y <= y2` on the `x = 0` face and
//! zero-gradient faces elsewhere. The x direction is semi-infinite.

use std::f64::consts::PI;

use super::erf::{erfc, exp_erfc};
use crate::{Error, Result};

pub const DEFAULT_COSINE_TERMS: usize = 5000;
const SERIES_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Analytic2DParams {
    pub width: f64,
    pub y1: f64,
    pub y2: f64,
    pub velocity_x: f64,
    pub dispersion_x: f64,
    pub dispersion_y: f64,
    pub c0: f64,
    pub n_terms: usize,
}

impl Analytic2DParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(Error::Config("width must be positive".into()));
        }
        if !(self.dispersion_x > 0.0 && self.dispersion_y > 0.0) {
            return Err(Error::Config("dispersion coefficients must be positive".into()));
        }
        if !(0.0 <= self.y1 && self.y1 <= self.y2 && self.y2 <= self.width) {
            return Err(Error::Config(format!(
                "injection strip [{}, {}] outside [0, {}]",
                self.y1, self.y2, self.width
            )));
        }
        if self.n_terms == 0 {
            return Err(Error::Config("series needs at least one term".into()));
        }
        Ok(())
    }

    /// Inlet value at `y`. At an interior edge of the strip this is the
    /// midpoint value the cosine series converges to.
    fn inlet(&self, y: f64) -> f64 {
        let tol = 1e-9 * self.width;
        let edge = |e: f64| e > tol && e < self.width - tol && (y - e).abs() <= tol;
        if self.y1 < self.y2 && (edge(self.y1) || edge(self.y2)) {
            0.5 * self.c0
        } else if self.y1 <= y && y <= self.y2 {
            self.c0
        } else {
            0.0
        }
    }
}

/// `sin(π s)` with the argument reduced exactly, so integer `s` gives 0.
fn sin_pi(s: f64) -> f64 {
    let r = s - 2.0 * (s / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

fn cos_pi(s: f64) -> f64 {
    sin_pi(s + 0.5)
}

/// The x–t factor of one series term.
fn bracket(x: f64, t: f64, u: f64, d: f64, zeta: f64) -> f64 {
    let root = 2.0 * (d * t).sqrt();
    let near = (x * (u - zeta) / (2.0 * d)).exp() * erfc((x - zeta * t) / root);
    near + exp_erfc(x * (u + zeta) / (2.0 * d), (x + zeta * t) / root)
}

/// Concentration at `(x, y, t)`.
///
/// On the inlet face the boundary value is returned directly (half the
/// injected value on the strip edges), and for `t <= 0` the clean initial
/// state.
pub fn analytic_2d(x: f64, y: f64, t: f64, p: &Analytic2DParams) -> f64 {
    if x <= 0.0 {
        return p.inlet(y);
    }
    if t <= 0.0 {
        return 0.0;
    }
    let (u, dx, dy, w) = (p.velocity_x, p.dispersion_x, p.dispersion_y, p.width);
    let mut sum = 0.5 * (p.y2 - p.y1) / w * bracket(x, t, u, dx, u.abs());
    for n in 1..p.n_terms {
        let nf = n as f64;
        let eta = nf * PI / w;
        let zeta = (u * u + 4.0 * eta * eta * dx * dy).sqrt();
        let b = bracket(x, t, u, dx, zeta);
        let pn = (sin_pi(nf * p.y2 / w) - sin_pi(nf * p.y1 / w)) / (nf * PI);
        sum += pn * cos_pi(nf * y / w) * b;
        if 2.0 / (nf * PI) * b.abs() < SERIES_CUTOFF {
            break;
        }
    }
    p.c0 * sum
}
