//! Reference fields for a case and the matching network predictions.

use std::time::Instant;

use super::case::{CaseKind, CaseSpec, FaceCondition};
use crate::exec::ExecMode;
use crate::net::{eval_jets, predict, JetPlan, ParameterSet};
use crate::oracles::{
    analytic_1d_approx, analytic_2d, darcy_velocity_field, fdm_pressure, fdm_transport, Analytic2DParams,
    Face, GridField, GridSpec, NodeBc, PressureBc, PressureSolution, Series1DParams, TransportOptions,
    TransportProblem, TransportSolution, DEFAULT_COSINE_TERMS,
};
use crate::physics::{darcy_velocity, AXIS_X, AXIS_Y};
use crate::{Error, Result};

/// A field at one time on the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedField {
    /// `C`, `P`, `ux` or `U`.
    pub name: String,
    pub field: GridField,
}

impl NamedField {
    fn new(name: &str, field: GridField) -> Self {
        Self { name: name.to_string(), field }
    }
}

/// Which solver produced the reference fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Analytic,
    Fdm,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Analytic => "analytic",
            ReferenceKind::Fdm => "fdm",
        }
    }
}

/// Evaluation grid of a 2D case: `n × n` nodes over the domain.
pub fn evaluation_grid(case: &CaseSpec, n: usize) -> Result<GridSpec> {
    GridSpec::new(n, n, [0.0, 0.0, case.length, case.width])
}

/// Extent of the `(x, t)` grid of a 1D case; t is stored as the second
/// coordinate.
fn column_extent(case: &CaseSpec) -> [f64; 4] {
    [0.0, 0.0, case.length, case.horizon]
}

/// Time at which the steady pressure output is read.
fn pressure_time(case: &CaseSpec) -> f64 {
    case.snapshots.iter().copied().fold(f64::NAN, f64::max).min(case.horizon)
}

/// True when the 2D closed form applies: injection on the left face only,
/// zero-gradient elsewhere, flow along x and no velocity-dependent
/// dispersion.
fn has_closed_form(case: &CaseSpec) -> bool {
    let bc = &case.concentration_bc;
    let u = case.transport.velocity.unwrap_or([0.0, 0.0]);
    case.kind == CaseKind::Uniform2D
        && matches!(bc.left, FaceCondition::Inlet { .. })
        && [bc.right, bc.bottom, bc.top].iter().all(|f| *f == FaceCondition::ZeroGradient)
        && u[1] == 0.0
        && u[0] >= 0.0
        && case.transport.alpha == 0.0
        && case.initial_concentration == 0.0
}

pub fn reference_kind(case: &CaseSpec) -> ReferenceKind {
    match case.kind {
        CaseKind::Column1D => ReferenceKind::Analytic,
        _ if has_closed_form(case) => ReferenceKind::Analytic,
        _ => ReferenceKind::Fdm,
    }
}

/// Raw finite-difference solution of a 2D case.
#[derive(Debug, Clone)]
pub struct FdmRun {
    pub pressure: Option<PressureSolution>,
    pub velocity: Vec<[f64; 2]>,
    pub transport: TransportSolution,
    pub seconds: f64,
}

/// Solves a 2D case with finite differences on an `n × n` grid up to the
/// last snapshot (or the horizon when there are none).
pub fn fdm_case(case: &CaseSpec, n: usize, mode: ExecMode) -> Result<FdmRun> {
    if case.kind == CaseKind::Column1D {
        return Err(Error::Config("the finite-difference oracle needs a 2D case".into()));
    }
    let start = Instant::now();
    let grid = evaluation_grid(case, n)?;
    let (pressure, velocity) = match case.kind {
        CaseKind::Darcy2D => {
            let perm = case
                .permeability
                .as_ref()
                .ok_or_else(|| Error::Config("physics.permeability is required".into()))?;
            let bc = case.pressure_bc.ok_or_else(|| Error::Config("pressure boundary missing".into()))?;
            let bc = PressureBc::Faces { left: bc.left, right: bc.right, bottom: bc.bottom, top: bc.top };
            let p = fdm_pressure(perm, case.transport.mu_phi, &bc, grid)?;
            let v = darcy_velocity_field(&p.field, &p.zeta)?;
            (Some(p), v)
        }
        _ => (None, vec![case.transport.velocity.unwrap_or([0.0, 0.0]); n * n]),
    };
    let bcs = case.concentration_bc;
    let c0 = case.transport.c0;
    let boundary = move |face: Face, lo: f64, hi: f64| match bcs.get(face) {
        FaceCondition::ZeroGradient => NodeBc::ZeroGradient,
        FaceCondition::Inlet { from, to } => NodeBc::Dirichlet(crate::oracles::strip_value(lo, hi, from, to, c0)),
    };
    let problem = TransportProblem {
        grid,
        velocity: &velocity,
        diffusion: [case.transport.diffusion_x, case.transport.diffusion_y],
        dispersivity: case.transport.alpha,
        boundary: &boundary,
        initial: case.initial_concentration,
        c_ref: c0.abs().max(case.initial_concentration.abs()),
    };
    let t_end = case.snapshots.iter().copied().fold(0.0, f64::max);
    let t_end = if t_end > 0.0 { t_end } else { case.horizon };
    let mut options = TransportOptions::new(t_end);
    options.snapshots = case.snapshots.clone();
    options.mode = mode;
    let transport = fdm_transport(&problem, &options)?;
    Ok(FdmRun { pressure, velocity, transport, seconds: start.elapsed().as_secs_f64() })
}

fn subsample(field: &GridField, factor: usize) -> Result<GridField> {
    let nx = (field.nx - 1) / factor + 1;
    let ny = (field.ny - 1) / factor + 1;
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            values.push(field.get(i * factor, j * factor));
        }
    }
    GridField::new(nx, ny, field.extent, field.time, values)
}

/// Speed from the x and y components on a 2D grid.
fn velocity_fields(grid: GridSpec, time: f64, velocity: &[[f64; 2]]) -> Result<(GridField, GridField)> {
    let ux = GridField::new(grid.nx, grid.ny, grid.extent, time, velocity.iter().map(|v| v[0]).collect())?;
    let speed = GridField::new(
        grid.nx,
        grid.ny,
        grid.extent,
        time,
        velocity.iter().map(|v| v[0].hypot(v[1])).collect(),
    )?;
    Ok((ux, speed))
}

/// Refinement factor of the finite-difference reference relative to the
/// evaluation grid.
pub const REFERENCE_REFINEMENT: usize = 2;

/// Reference fields on the `n`-node evaluation grid: `C` at every snapshot
/// (or on the `(x, t)` grid for 1D cases), plus `P`, `ux` and `U` for
/// pressure-carrying cases.
pub fn reference_fields(case: &CaseSpec, n: usize, mode: ExecMode) -> Result<Vec<NamedField>> {
    let t = &case.transport;
    match reference_kind(case) {
        ReferenceKind::Analytic if case.kind == CaseKind::Column1D => {
            let u = t.velocity.map_or(0.0, |v| v[0]);
            let d = t.dispersion_xy(u.abs())[0];
            let p = Series1DParams::new(case.length, u, d, t.c0);
            p.validate()?;
            let f = GridField::from_fn(n, n, column_extent(case), case.horizon, |x, time| {
                analytic_1d_approx(x, time, &p)
            })?;
            Ok(vec![NamedField::new("C", f)])
        }
        ReferenceKind::Analytic => {
            let FaceCondition::Inlet { from, to } = case.concentration_bc.left else {
                unreachable!("closed form requires a left inlet")
            };
            let u = t.velocity.map_or(0.0, |v| v[0]);
            let d = t.dispersion_xy(u);
            let p = Analytic2DParams {
                width: case.width,
                y1: from,
                y2: to,
                velocity_x: u,
                dispersion_x: d[0],
                dispersion_y: d[1],
                c0: t.c0,
                n_terms: DEFAULT_COSINE_TERMS,
            };
            p.validate()?;
            let grid = evaluation_grid(case, n)?;
            case.snapshots
                .iter()
                .map(|&time| Ok(NamedField::new("C", grid.sample(time, |x, y| analytic_2d(x, y, time, &p))?)))
                .collect()
        }
        ReferenceKind::Fdm => {
            let fine = REFERENCE_REFINEMENT * (n - 1) + 1;
            let run = fdm_case(case, fine, mode)?;
            let mut out = Vec::new();
            if let Some(p) = &run.pressure {
                let grid = evaluation_grid(case, fine)?;
                let tp = pressure_time(case);
                let tp = if tp.is_nan() { case.horizon } else { tp };
                let mut pf = subsample(&p.field, REFERENCE_REFINEMENT)?;
                pf.time = tp;
                out.push(NamedField::new("P", pf));
                let (ux, speed) = velocity_fields(grid, tp, &run.velocity)?;
                out.push(NamedField::new("ux", subsample(&ux, REFERENCE_REFINEMENT)?));
                out.push(NamedField::new("U", subsample(&speed, REFERENCE_REFINEMENT)?));
            }
            for snap in &run.transport.snapshots {
                out.push(NamedField::new("C", subsample(snap, REFERENCE_REFINEMENT)?));
            }
            Ok(out)
        }
    }
}

/// Network predictions in physical units, in the same order and on the same
/// grids as [`reference_fields`].
pub fn predicted_fields(case: &CaseSpec, params: &ParameterSet, n: usize, mode: ExecMode) -> Result<Vec<NamedField>> {
    let norm = case.normalization();
    let ci = case.kind.concentration_output();
    let n_out = case.kind.output_dim();
    if case.kind == CaseKind::Column1D {
        let extent = column_extent(case);
        let template = GridField::new(n, n, extent, case.horizon, vec![0.0; n * n])?;
        let inputs: Vec<f64> = template
            .coordinates()
            .chunks_exact(2)
            .flat_map(|p| [p[0] / norm.length_x, p[1] / norm.time])
            .collect();
        let out = predict(params, &inputs, mode)?;
        let values = out.iter().map(|c| norm.to_concentration(*c)).collect();
        return Ok(vec![NamedField::new("C", GridField::new(n, n, extent, case.horizon, values)?)]);
    }
    let grid = evaluation_grid(case, n)?;
    let template = grid.sample(0.0, |_, _| 0.0)?;
    let xy = template.coordinates();
    let at_time = |time: f64| -> Vec<f64> {
        xy.chunks_exact(2)
            .flat_map(|p| [p[0] / norm.length_x, p[1] / norm.length_y, time / norm.time])
            .collect()
    };
    let field = |time: f64, values: Vec<f64>| GridField::new(n, n, grid.extent, time, values);

    let mut out = Vec::new();
    if case.kind == CaseKind::Darcy2D {
        let perm = case
            .permeability
            .as_ref()
            .ok_or_else(|| Error::Config("physics.permeability is required".into()))?;
        let tp = pressure_time(case);
        let tp = if tp.is_nan() { case.horizon } else { tp };
        let jets = eval_jets(params, &at_time(tp), JetPlan::first_order(), mode)?;
        let mut p = Vec::with_capacity(jets.len());
        let mut velocity = Vec::with_capacity(jets.len());
        for (jet, pt) in jets.iter().zip(xy.chunks_exact(2)) {
            p.push(norm.to_pressure(jet.value(0)));
            let grad = [
                jet.d1(0, AXIS_X) * norm.p_range() / norm.length_x,
                jet.d1(0, AXIS_Y) * norm.p_range() / norm.length_y,
            ];
            let (zeta, _) = perm.zeta(case.transport.mu_phi, pt[0], pt[1])?;
            velocity.push(darcy_velocity(grad, zeta).0);
        }
        out.push(NamedField::new("P", field(tp, p)?));
        let (ux, speed) = velocity_fields(grid, tp, &velocity)?;
        out.push(NamedField::new("ux", ux));
        out.push(NamedField::new("U", speed));
    }
    for &time in &case.snapshots {
        let values = predict(params, &at_time(time), mode)?;
        let c = values.chunks_exact(n_out).map(|v| norm.to_concentration(v[ci])).collect();
        out.push(NamedField::new("C", field(time, c)?));
    }
    Ok(out)
}
