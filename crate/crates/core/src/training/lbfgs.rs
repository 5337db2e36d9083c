//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsOptions {
    /// Stored correction pairs; 0 gives steepest descent with line search.
    pub memory: usize,
    pub max_iters: usize,
    /// Stop once the objective drops below this value.
    pub tolerance: f64,
    /// Stop once the largest gradient component drops below this value.
    pub grad_tolerance: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
    pub time_limit: Option<Duration>,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iters: 20_000,
            tolerance: 1e-6,
            grad_tolerance: 1e-9,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 30,
            time_limit: None,
        }
    }
}

impl LbfgsOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(Error::Config(format!(
                "line search needs 0 < c1 < c2 < 1, got c1 = {}, c2 = {}",
                self.c1, self.c2
            )));
        }
        if !(self.tolerance >= 0.0 && self.grad_tolerance >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        if self.max_line_search == 0 {
            return Err(Error::Config("line search needs at least one trial".into()));
        }
        Ok(())
    }
}

/// Function and gradient oracle driven by the optimiser.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// Called after each accepted step with the new iterate. The last call
    /// to `evaluate` was made at `x`.
    fn on_iteration(&mut self, _iteration: usize, _f: f64, _x: &[f64]) {}
}

impl<F> Objective for F
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
    TimeLimit,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::GradientTolerance => "gradient-tolerance",
            StopReason::MaxIterations => "max-iterations",
            StopReason::LineSearchFailed => "line-search-failed",
            StopReason::TimeLimit => "time-limit",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    /// Best point seen over all evaluations.
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// True when a tolerance was met.
    pub converged: bool,
    pub reason: StopReason,
    /// Best-so-far objective after each iteration, starting with the
    /// initial point.
    pub history: Vec<f64>,
}

struct Tracker<'a> {
    objective: &'a mut dyn Objective,
    evaluations: usize,
    best_f: f64,
    best_x: Vec<f64>,
}

impl Tracker<'_> {
    /// Evaluates at `x`. A divergent trial point reads as `+∞` so the line
    /// search backs off instead of aborting.
    fn eval(&mut self, x: &[f64], trial: bool) -> Result<(f64, Vec<f64>)> {
        self.evaluations += 1;
        let (f, g) = match self.objective.evaluate(x) {
            Ok(v) => v,
            Err(Error::Divergence { .. }) if trial => return Ok((f64::INFINITY, vec![0.0; x.len()])),
            Err(e) => return Err(e),
        };
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            if trial {
                return Ok((f64::INFINITY, vec![0.0; x.len()]));
            }
            return Err(Error::Divergence { term: "objective".into() });
        }
        if f < self.best_f {
            self.best_f = f;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        Ok((f, g))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimiser of the cubic through two points with slopes, or `None` when
/// the cubic has no usable minimiser.
fn cubic_min(a: f64, fa: f64, da: f64, b: f64, fb: f64, db: f64) -> Option<f64> {
    let d1 = da + db - 3.0 * (fa - fb) / (a - b);
    let disc = d1 * d1 - da * db;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let m = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    m.is_finite().then_some(m)
}

struct Step {
    alpha: f64,
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

/// Strong-Wolfe line search along `d`; `None` when no acceptable step was
/// found within the trial budget.
#[allow(clippy::too_many_arguments)]
fn line_search(
    tracker: &mut Tracker<'_>,
    x: &[f64],
    f0: f64,
    dphi0: f64,
    d: &[f64],
    alpha0: f64,
    opts: &LbfgsOptions,
) -> Result<Option<Step>> {
    let (c1, c2) = (opts.c1, opts.c2);
    let mut trials = 0;
    let eval = |tracker: &mut Tracker<'_>, alpha: f64| -> Result<Step> {
        let xa = axpy(x, alpha, d);
        let (f, g) = tracker.eval(&xa, true)?;
        Ok(Step { alpha, x: xa, f, g })
    };

    let mut prev = (0.0, f0, dphi0);
    let mut alpha = alpha0;
    let (mut lo, mut hi);
    loop {
        if trials == opts.max_line_search {
            return Ok(None);
        }
        trials += 1;
        let s = eval(tracker, alpha)?;
        let dphi = dot(&s.g, d);
        if s.f > f0 + c1 * alpha * dphi0 || (trials > 1 && s.f >= prev.1) {
            lo = prev;
            hi = (alpha, s.f, dphi);
            break;
        }
        if dphi.abs() <= -c2 * dphi0 {
            return Ok(Some(s));
        }
        if dphi >= 0.0 {
            lo = (alpha, s.f, dphi);
            hi = prev;
            break;
        }
        prev = (alpha, s.f, dphi);
        alpha *= 2.0;
    }

    // Zoom: `lo` always satisfies sufficient decrease with the lowest value.
    while trials < opts.max_line_search {
        trials += 1;
        let (a, b) = (lo.0.min(hi.0), lo.0.max(hi.0));
        let width = b - a;
        if width <= f64::EPSILON * b.max(1e-300) {
            return Ok(None);
        }
        let guess = if hi.1.is_finite() {
            cubic_min(lo.0, lo.1, lo.2, hi.0, hi.1, hi.2)
        } else {
            None
        };
        let alpha = match guess {
            Some(m) if m > a + 0.1 * width && m < b - 0.1 * width => m,
            _ => 0.5 * (a + b),
        };
        let s = eval(tracker, alpha)?;
        let dphi = dot(&s.g, d);
        if s.f > f0 + c1 * alpha * dphi0 || s.f >= lo.1 {
            hi = (alpha, s.f, dphi);
        } else {
            if dphi.abs() <= -c2 * dphi0 {
                return Ok(Some(s));
            }
            if dphi * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, s.f, dphi);
        }
    }
    Ok(None)
}

pub fn lbfgs_minimize(objective: &mut dyn Objective, x0: Vec<f64>, opts: &LbfgsOptions) -> Result<LbfgsResult> {
    opts.validate()?;
    let start = Instant::now();
    let mut tracker = Tracker {
        objective,
        evaluations: 0,
        best_f: f64::INFINITY,
        best_x: x0.clone(),
    };
    let mut x = x0;
    let (mut f, mut g) = tracker.eval(&x, false)?;
    let mut history = vec![tracker.best_f];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut last_step: Option<(f64, f64)> = None;

    let reason = loop {
        if tracker.best_f < opts.tolerance {
            break StopReason::Tolerance;
        }
        if max_abs(&g) < opts.grad_tolerance {
            break StopReason::GradientTolerance;
        }
        if iterations >= opts.max_iters {
            break StopReason::MaxIterations;
        }
        if opts.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break StopReason::TimeLimit;
        }

        // Two-loop recursion.
        let mut q: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d = q;
        let mut dphi0 = dot(&g, &d);
        if !(dphi0 < 0.0) {
            pairs.clear();
            d = g.iter().map(|v| -v).collect();
            dphi0 = dot(&g, &d);
        }

        let alpha0 = if !pairs.is_empty() {
            1.0
        } else if let Some((alpha_prev, dphi_prev)) = last_step {
            (alpha_prev * dphi_prev / dphi0).clamp(1e-12, 1e12)
        } else {
            (1.0 / dot(&g, &g).sqrt()).min(1.0)
        };

        let Some(step) = line_search(&mut tracker, &x, f, dphi0, &d, alpha0, opts)? else {
            break StopReason::LineSearchFailed;
        };
        last_step = Some((step.alpha, dphi0));
        if opts.memory > 0 {
            let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                if pairs.len() == opts.memory {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, 1.0 / sy));
            }
        }
        x = step.x;
        f = step.f;
        g = step.g;
        iterations += 1;
        history.push(tracker.best_f);
        tracker.objective.on_iteration(iterations, f, &x);
    };

    Ok(LbfgsResult {
        x: tracker.best_x,
        f: tracker.best_f,
        iterations,
        evaluations: tracker.evaluations,
        converged: matches!(reason, StopReason::Tolerance | StopReason::GradientTolerance),
        reason,
        history,
    })
}
