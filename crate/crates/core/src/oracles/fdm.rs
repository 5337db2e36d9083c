//! Finite-difference reference solvers on uniform node grids.
//!
//! Pressure: 5-point stencil for `∇·(ζ∇P) = 0` with harmonic face averages
//! of ζ, Dirichlet data on every boundary node, Jacobi-preconditioned
//! conjugate gradients. Transport: explicit Euler with first-order upwind
//! advection and central diffusion; zero-gradient faces use mirrored ghost
//! nodes.

use std::sync::Arc;

use super::grid::GridField;
use crate::exec::{map_chunks, ExecMode};
use crate::physics::PermeabilityField;
use crate::{Error, Result};

/// Node lattice shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// `[x0, y0, x1, y1]`.
    pub extent: [f64; 4],
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, extent: [f64; 4]) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::Config(format!("finite-difference grid {nx}x{ny} is too small")));
        }
        if !(extent[2] > extent[0] && extent[3] > extent[1]) {
            return Err(Error::Config(format!("degenerate extent {extent:?}")));
        }
        Ok(Self { nx, ny, extent })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, n, [0.0, 0.0, 1.0, 1.0])
    }

    /// Field with every node set by `f`; used for node coordinates too.
    pub fn sample(&self, time: f64, f: impl FnMut(f64, f64) -> f64) -> Result<GridField> {
        GridField::from_fn(self.nx, self.ny, self.extent, time, f)
    }

    fn spacing(&self) -> (f64, f64) {
        (
            (self.extent[2] - self.extent[0]) / (self.nx - 1) as f64,
            (self.extent[3] - self.extent[1]) / (self.ny - 1) as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Left,
    Right,
    Bottom,
    Top,
}

/// Boundary pressure, either constant per face or an arbitrary function of
/// position. Corner nodes of constant faces take the mean of the two faces.
#[derive(Clone)]
pub enum PressureBc {
    Faces { left: f64, right: f64, bottom: f64, top: f64 },
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PressureBc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PressureBc::Faces { left, right, bottom, top } => f
                .debug_struct("Faces")
                .field("left", left)
                .field("right", right)
                .field("bottom", bottom)
                .field("top", top)
                .finish(),
            PressureBc::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl PressureBc {
    fn value(&self, grid: &GridSpec, i: usize, j: usize, x: f64, y: f64) -> f64 {
        match self {
            PressureBc::Faces { left, right, bottom, top } => {
                let mut sum = 0.0;
                let mut n = 0.0;
                for (on, v) in [
                    (i == 0, left),
                    (i + 1 == grid.nx, right),
                    (j == 0, bottom),
                    (j + 1 == grid.ny, top),
                ] {
                    if on {
                        sum += v;
                        n += 1.0;
                    }
                }
                sum / n
            }
            PressureBc::Function(f) => f(x, y),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PressureSolution {
    pub field: GridField,
    /// Mobility at each node, same layout as `field`.
    pub zeta: GridField,
    pub iterations: usize,
    pub relative_residual: f64,
}

const PRESSURE_TOLERANCE: f64 = 1e-12;

/// Steady pressure for the mobility `k/(μφ)` of `perm`.
pub fn fdm_pressure(
    perm: &PermeabilityField,
    mu_phi: f64,
    bc: &PressureBc,
    grid: GridSpec,
) -> Result<PressureSolution> {
    let mut failure = None;
    let zeta = grid.sample(0.0, |x, y| match perm.zeta(mu_phi, x, y) {
        Ok((z, _)) => z,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if zeta.values.iter().any(|z| !(*z > 0.0 && z.is_finite())) {
        return Err(Error::Config("mobility must be positive on the grid".into()));
    }
    solve_pressure(zeta, bc, grid)
}

/// Pressure solve with node mobilities given directly.
pub fn solve_pressure(zeta: GridField, bc: &PressureBc, grid: GridSpec) -> Result<PressureSolution> {
    let (nx, ny) = (grid.nx, grid.ny);
    let (hx, hy) = grid.spacing();
    let (ax, ay) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    let z = |i: usize, j: usize| zeta.values[j * nx + i];
    let harmonic = |a: f64, b: f64| 2.0 * a * b / (a + b);

    let mut p = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                let (x, y) = zeta.node(i, j);
                p[j * nx + i] = bc.value(&grid, i, j, x, y);
            }
        }
    }

    // Unknowns are the interior nodes, numbered row by row.
    let (mx, my) = (nx - 2, ny - 2);
    let n = mx * my;
    // Face coefficients west, east, south, north for each unknown.
    let mut coef = vec![[0.0; 4]; n];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for jj in 0..my {
        for ii in 0..mx {
            let (i, j) = (ii + 1, jj + 1);
            let c = z(i, j);
            let f = [
                ax * harmonic(c, z(i - 1, j)),
                ax * harmonic(c, z(i + 1, j)),
                ay * harmonic(c, z(i, j - 1)),
                ay * harmonic(c, z(i, j + 1)),
            ];
            let k = jj * mx + ii;
            diag[k] = f.iter().sum();
            let nb = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)];
            for (d, (a, b)) in nb.into_iter().enumerate() {
                let boundary = a == 0 || b == 0 || a + 1 == nx || b + 1 == ny;
                if boundary {
                    rhs[k] += f[d] * p[b * nx + a];
                } else {
                    coef[k][d] = f[d];
                }
            }
        }
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        for jj in 0..my {
            for ii in 0..mx {
                let k = jj * mx + ii;
                let c = &coef[k];
                let mut s = diag[k] * v[k];
                if ii > 0 {
                    s -= c[0] * v[k - 1];
                }
                if ii + 1 < mx {
                    s -= c[1] * v[k + 1];
                }
                if jj > 0 {
                    s -= c[2] * v[k - mx];
                }
                if jj + 1 < my {
                    s -= c[3] * v[k + mx];
                }
                out[k] = s;
            }
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let b_norm = dot(&rhs, &rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    let mut s: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut d = s.clone();
    let mut q = vec![0.0; n];
    let mut rs = dot(&r, &s);
    let max_iterations = 20 * n + 100;
    let mut iterations = 0;
    let mut residual = dot(&r, &r).sqrt() / b_norm;
    while residual > PRESSURE_TOLERANCE {
        if iterations == max_iterations {
            return Err(Error::Numerical(format!(
                "pressure solve stalled at relative residual {residual:e} after {iterations} iterations"
            )));
        }
        apply(&d, &mut q);
        let alpha = rs / dot(&d, &q);
        for k in 0..n {
            x[k] += alpha * d[k];
            r[k] -= alpha * q[k];
        }
        for k in 0..n {
            s[k] = r[k] / diag[k];
        }
        let rs_next = dot(&r, &s);
        let beta = rs_next / rs;
        rs = rs_next;
        for k in 0..n {
            d[k] = s[k] + beta * d[k];
        }
        iterations += 1;
        residual = dot(&r, &r).sqrt() / b_norm;
        if !residual.is_finite() {
            return Err(Error::Numerical("pressure solve produced a non-finite residual".into()));
        }
    }
    for jj in 0..my {
        for ii in 0..mx {
            p[(jj + 1) * nx + ii + 1] = x[jj * mx + ii];
        }
    }
    let field = GridField::new(nx, ny, grid.extent, 0.0, p)?;
    Ok(PressureSolution { field, zeta, iterations, relative_residual: residual })
}

/// Darcy velocity `u = -ζ ∇P` at every node. Central differences inside,
/// second-order one-sided differences on the boundary.
pub fn darcy_velocity_field(pressure: &GridField, zeta: &GridField) -> Result<Vec<[f64; 2]>> {
    if pressure.nx != zeta.nx || pressure.ny != zeta.ny || pressure.nx < 3 || pressure.ny < 3 {
        return Err(Error::Shape("pressure and mobility grids differ or are too small".into()));
    }
    let (nx, ny) = (pressure.nx, pressure.ny);
    let (hx, hy) = pressure.spacing();
    let p = |i: usize, j: usize| pressure.values[j * nx + i];
    let derivative = |k: usize, n: usize, h: f64, at: &dyn Fn(usize) -> f64| {
        if k == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if k + 1 == n {
            (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
        } else {
            (at(k + 1) - at(k - 1)) / (2.0 * h)
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let px = derivative(i, nx, hx, &|a| p(a, j));
            let py = derivative(j, ny, hy, &|b| p(i, b));
            let z = zeta.values[j * nx + i];
            out.push([-z * px, -z * py]);
        }
    }
    Ok(out)
}

/// Boundary treatment of one boundary node for transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeBc {
    Dirichlet(f64),
    ZeroGradient,
}

/// Boundary condition for the node whose control segment along `face` is
/// `[lo, hi]`.
pub type TransportBoundary = dyn Fn(Face, f64, f64) -> NodeBc + Send + Sync;

/// Dirichlet value for a node covering `[lo, hi]` when `value` is injected on
/// `[a, b]` and zero elsewhere: the injected value weighted by overlap.
pub fn strip_value(lo: f64, hi: f64, a: f64, b: f64, value: f64) -> f64 {
    let overlap = (hi.min(b) - lo.max(a)).max(0.0);
    if hi > lo {
        value * overlap / (hi - lo)
    } else if (a..=b).contains(&lo) {
        value
    } else {
        0.0
    }
}

pub struct TransportProblem<'a> {
    pub grid: GridSpec,
    /// Velocity at each node, row-major with y outer.
    pub velocity: &'a [[f64; 2]],
    /// Molecular diffusion `[D_x, D_y]`.
    pub diffusion: [f64; 2],
    pub dispersivity: f64,
    pub boundary: &'a TransportBoundary,
    pub initial: f64,
    /// Reference concentration for the instability check.
    pub c_ref: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportOptions {
    pub t_end: f64,
    pub cfl: f64,
    pub snapshots: Vec<f64>,
    pub mode: ExecMode,
}

impl TransportOptions {
    pub fn new(t_end: f64) -> Self {
        Self { t_end, cfl: 0.9, snapshots: Vec::new(), mode: ExecMode::default() }
    }
}

#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub field: GridField,
    /// Fields at the requested snapshot times, in ascending time order.
    pub snapshots: Vec<GridField>,
    pub steps: usize,
    pub dt: f64,
}

enum Kind {
    Interior,
    Fixed(f64),
    /// Mirror flags for the x and y neighbours: `Some(true)` mirrors the low
    /// side, `Some(false)` the high side.
    Mirrored(Option<bool>, Option<bool>),
}

const ROWS_PER_CHUNK: usize = 8;

pub fn fdm_transport(problem: &TransportProblem<'_>, options: &TransportOptions) -> Result<TransportSolution> {
    let grid = problem.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    if problem.velocity.len() != nx * ny {
        return Err(Error::Shape(format!(
            "{} velocity nodes for a {nx}x{ny} grid",
            problem.velocity.len()
        )));
    }
    if !(options.cfl > 0.0 && options.cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", options.cfl)));
    }
    if !(options.t_end >= 0.0) || options.snapshots.iter().any(|t| !(*t >= 0.0 && *t <= options.t_end)) {
        return Err(Error::Config("snapshot times must lie in [0, t_end]".into()));
    }
    let (hx, hy) = grid.spacing();
    let coords = grid.sample(0.0, |_, _| 0.0)?;

    let mut kinds = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = coords.node(i, j);
            let along_y = ((y - 0.5 * hy).max(grid.extent[1]), (y + 0.5 * hy).min(grid.extent[3]));
            let along_x = ((x - 0.5 * hx).max(grid.extent[0]), (x + 0.5 * hx).min(grid.extent[2]));
            let mut faces = Vec::new();
            if i == 0 {
                faces.push((Face::Left, along_y));
            }
            if i + 1 == nx {
                faces.push((Face::Right, along_y));
            }
            if j == 0 {
                faces.push((Face::Bottom, along_x));
            }
            if j + 1 == ny {
                faces.push((Face::Top, along_x));
            }
            let conditions: Vec<(Face, NodeBc)> =
                faces.iter().map(|&(f, (lo, hi))| (f, (problem.boundary)(f, lo, hi))).collect();
            let fixed = conditions.iter().find_map(|(_, c)| match c {
                NodeBc::Dirichlet(v) => Some(*v),
                NodeBc::ZeroGradient => None,
            });
            kinds.push(match (fixed, faces.is_empty()) {
                (Some(v), _) => Kind::Fixed(v),
                (None, true) => Kind::Interior,
                (None, false) => Kind::Mirrored(
                    (i == 0).then_some(true).or((i + 1 == nx).then_some(false)),
                    (j == 0).then_some(true).or((j + 1 == ny).then_some(false)),
                ),
            });
        }
    }

    let dispersion: Vec<[f64; 2]> = problem
        .velocity
        .iter()
        .map(|u| {
            let speed = u[0].hypot(u[1]);
            [
                problem.diffusion[0] + problem.dispersivity * speed,
                problem.diffusion[1] + problem.dispersivity * speed,
            ]
        })
        .collect();
    // Fixed nodes never update, so they do not limit the step.
    let rate = problem
        .velocity
        .iter()
        .zip(&dispersion)
        .zip(&kinds)
        .filter(|(_, k)| !matches!(k, Kind::Fixed(_)))
        .map(|((u, d), _)| u[0].abs() / hx + u[1].abs() / hy + 2.0 * d[0] / (hx * hx) + 2.0 * d[1] / (hy * hy))
        .fold(0.0, f64::max);
    let dt_max = if rate > 0.0 { options.cfl / rate } else { options.t_end.max(1.0) };

    let mut c: Vec<f64> = kinds
        .iter()
        .map(|k| match k {
            Kind::Fixed(v) => *v,
            _ => problem.initial,
        })
        .collect();
    let limit = 10.0 * problem.c_ref.abs().max(problem.initial.abs()).max(f64::MIN_POSITIVE);

    let mut stops: Vec<f64> = options.snapshots.clone();
    stops.sort_by(f64::total_cmp);
    let mut snapshots = Vec::with_capacity(stops.len());
    let mut t = 0.0;
    let mut steps = 0;
    let mut next_stop = 0;
    let field_at = |c: &[f64], time: f64| GridField::new(nx, ny, grid.extent, time, c.to_vec());

    while next_stop < stops.len() && stops[next_stop] <= t {
        snapshots.push(field_at(&c, stops[next_stop])?);
        next_stop += 1;
    }
    while t < options.t_end {
        let target = stops.get(next_stop).copied().unwrap_or(options.t_end);
        let mut dt = dt_max.min(target - t);
        // Avoid a sliver step just before a stop.
        if target - t - dt < 1e-9 * dt_max {
            dt = target - t;
        }
        let rows = map_chunks(options.mode, ny, ROWS_PER_CHUNK, |range| {
            let mut out = Vec::with_capacity(range.len() * nx);
            for j in range {
                for i in 0..nx {
                    let k = j * nx + i;
                    out.push(match kinds[k] {
                        Kind::Fixed(v) => v,
                        Kind::Interior => c[k] + dt * rhs_at(&c, i, j, nx, problem.velocity[k], &dispersion, None, None, hx, hy),
                        Kind::Mirrored(mx, my) => {
                            c[k] + dt * rhs_at(&c, i, j, nx, problem.velocity[k], &dispersion, mx, my, hx, hy)
                        }
                    });
                }
            }
            out
        });
        let mut k = 0;
        let mut peak: f64 = 0.0;
        for row in rows {
            for v in row {
                peak = peak.max(v.abs());
                if !v.is_finite() {
                    peak = f64::INFINITY;
                }
                c[k] = v;
                k += 1;
            }
        }
        if !(peak <= limit) {
            return Err(Error::Numerical(format!(
                "transport solve unstable at t = {t}: max |C| = {peak:e}"
            )));
        }
        t = if dt == target - t { target } else { t + dt };
        steps += 1;
        while next_stop < stops.len() && stops[next_stop] <= t {
            snapshots.push(field_at(&c, stops[next_stop])?);
            next_stop += 1;
        }
    }
    Ok(TransportSolution { field: field_at(&c, options.t_end)?, snapshots, steps, dt: dt_max })
}

#[allow(clippy::too_many_arguments)]
fn rhs_at(
    c: &[f64],
    i: usize,
    j: usize,
    nx: usize,
    u: [f64; 2],
    d: &[[f64; 2]],
    mirror_x: Option<bool>,
    mirror_y: Option<bool>,
    hx: f64,
    hy: f64,
) -> f64 {
    let k = j * nx + i;
    // Neighbour indices with mirrored ghosts on zero-gradient faces.
    let (w, e) = match mirror_x {
        Some(true) => (k + 1, k + 1),
        Some(false) => (k - 1, k - 1),
        None => (k - 1, k + 1),
    };
    let (s, n) = match mirror_y {
        Some(true) => (k + nx, k + nx),
        Some(false) => (k - nx, k - nx),
        None => (k - nx, k + nx),
    };
    let ck = c[k];
    let adv_x = if u[0] >= 0.0 { u[0] * (ck - c[w]) / hx } else { u[0] * (c[e] - ck) / hx };
    let adv_y = if u[1] >= 0.0 { u[1] * (ck - c[s]) / hy } else { u[1] * (c[n] - ck) / hy };
    let face = |a: usize, axis: usize| 0.5 * (d[k][axis] + d[a][axis]);
    let diff_x = (face(e, 0) * (c[e] - ck) - face(w, 0) * (ck - c[w])) / (hx * hx);
    let diff_y = (face(n, 1) * (c[n] - ck) - face(s, 1) * (ck - c[s])) / (hy * hy);
    diff_x + diff_y - adv_x - adv_y
}

/// Total solute `Σ C h_x h_y` over the node grid (trapezoid weights).
pub fn total_mass(field: &GridField) -> f64 {
    let (hx, hy) = field.spacing();
    let mut sum = 0.0;
    for j in 0..field.ny {
        let wy = if j == 0 || j + 1 == field.ny { 0.5 } else { 1.0 };
        for i in 0..field.nx {
            let wx = if i == 0 || i + 1 == field.nx { 0.5 } else { 1.0 };
            sum += wx * wy * field.get(i, j);
        }
    }
    sum * hx * hy
}

#[cfg(test)]
mod tests {
    use super::*;

    fn faces(left: f64, right: f64, bottom: f64, top: f64) -> PressureBc {
        PressureBc::Faces { left, right, bottom, top }
    }

    #[test]
    fn linear_ramp_reproduced() {
        let bc = PressureBc::Function(Arc::new(|x, _| x));
        let sol = fdm_pressure(&PermeabilityField::Homogeneous { k: 1.0 }, 1.0, &bc, GridSpec::unit(21).unwrap())
            .unwrap();
        for j in 0..21 {
            for i in 0..21 {
                let (x, _) = sol.field.node(i, j);
                assert!((sol.field.get(i, j) - x).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn corner_values_average_faces() {
        let sol = fdm_pressure(
            &PermeabilityField::Homogeneous { k: 1.0 },
            1.0,
            &faces(0.1, 0.1, 1.0, 1.0),
            GridSpec::unit(11).unwrap(),
        )
        .unwrap();
        assert!((sol.field.get(0, 0) - 0.55).abs() < 1e-15);
        assert_eq!(sol.field.get(5, 0), 1.0);
        assert_eq!(sol.field.get(0, 5), 0.1);
    }

    #[test]
    fn strip_overlap_weights() {
        assert_eq!(strip_value(0.0, 0.1, 0.3, 0.7, 2.0), 0.0);
        assert_eq!(strip_value(0.4, 0.5, 0.3, 0.7, 2.0), 2.0);
        assert!((strip_value(0.25, 0.35, 0.3, 0.7, 2.0) - 1.0).abs() < 1e-12);
        assert_eq!(strip_value(0.3, 0.3, 0.3, 0.7, 2.0), 2.0);
    }

    #[test]
    fn zero_injection_stays_clean() {
        let grid = GridSpec::unit(21).unwrap();
        let velocity = vec![[0.5, 0.1]; 21 * 21];
        let boundary = |f: Face, _, _| if f == Face::Left { NodeBc::Dirichlet(0.0) } else { NodeBc::ZeroGradient };
        let problem = TransportProblem {
            grid,
            velocity: &velocity,
            diffusion: [0.02, 0.02],
            dispersivity: 0.0,
            boundary: &boundary,
            initial: 0.0,
            c_ref: 0.0,
        };
        let sol = fdm_transport(&problem, &TransportOptions::new(0.5)).unwrap();
        assert!(sol.field.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let grid = GridSpec::unit(11).unwrap();
        let velocity = vec![[0.0, 0.0]; 121];
        let boundary = |_: Face, _, _| NodeBc::Dirichlet(1.0);
        let problem = TransportProblem {
            grid,
            velocity: &velocity,
            diffusion: [0.02, 0.02],
            dispersivity: 0.0,
            boundary: &boundary,
            initial: 0.0,
            c_ref: 1.0,
        };
        let mut options = TransportOptions::new(1.0);
        options.snapshots = vec![0.25, 0.0, 0.5];
        let sol = fdm_transport(&problem, &options).unwrap();
        let times: Vec<f64> = sol.snapshots.iter().map(|f| f.time).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5]);
        assert_eq!(sol.field.time, 1.0);
        assert!(sol.snapshots[0].get(5, 5) == 0.0 && sol.field.get(5, 5) > sol.snapshots[2].get(5, 5));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let grid = GridSpec::unit(31).unwrap();
        let velocity: Vec<[f64; 2]> = (0..31 * 31).map(|k| [0.3 + 0.001 * (k % 7) as f64, -0.1]).collect();
        let boundary = |f: Face, lo: f64, hi: f64| match f {
            Face::Left => NodeBc::Dirichlet(strip_value(lo, hi, 0.3, 0.7, 1.0)),
            _ => NodeBc::ZeroGradient,
        };
        let problem = TransportProblem {
            grid,
            velocity: &velocity,
            diffusion: [0.02, 0.01],
            dispersivity: 0.05,
            boundary: &boundary,
            initial: 0.0,
            c_ref: 1.0,
        };
        let mut options = TransportOptions::new(0.3);
        options.mode = ExecMode::Sequential;
        let a = fdm_transport(&problem, &options).unwrap();
        options.mode = ExecMode::Parallel;
        let b = fdm_transport(&problem, &options).unwrap();
        assert_eq!(a.field, b.field);
    }
}
