//! The weighted four-term loss over a [`CollocationSet`].

use super::collocation::{CollocationSet, Constraint};
use crate::exec::ExecMode;
use crate::harness::{CaseKind, CaseSpec};
use crate::net::{eval_jets, FieldJet, Jet, JetLoss, JetPlan, ParameterSet};
use crate::physics::{
    residual_ade_darcy, AdeCoefficients, Normalization, PressureCoefficients,
    TransportParams, AXIS_X, AXIS_Y,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub initial: f64,
    pub boundary: f64,
    pub data: f64,
    pub pde: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { initial: 1.0, boundary: 1.0, data: 1.0, pde: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.initial, self.boundary, self.data, self.pde];
        if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("loss weights must be finite and nonnegative".into()));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::Config("at least one loss weight must be positive".into()));
        }
        Ok(())
    }
}

/// Unweighted loss terms and the weighted total.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TermBreakdown {
    pub initial: f64,
    pub boundary: f64,
    pub data: f64,
    pub pde: f64,
    /// Pressure share of `pde`; zero on cases without pressure.
    pub pde_pressure: f64,
    pub pde_concentration: f64,
    pub total: f64,
}

pub const BLOCK_PDE: usize = 0;
pub const BLOCK_BC: usize = 1;
pub const BLOCK_IC: usize = 2;
pub const BLOCK_DATA: usize = 3;
const LABELS: [&str; 4] = ["PDE", "BC", "IC", "Data"];

enum Physics {
    Uniform(AdeCoefficients),
    Darcy {
        transport: TransportParams,
        norm: Normalization,
        /// Mobility and its gradient at each interior point.
        zeta: Vec<(f64, [f64; 2])>,
        pressure: Vec<PressureCoefficients>,
    },
}

/// Residuals of the active equations at one interior jet.
struct Residuals {
    concentration: f64,
    d_concentration: FieldJet,
    pressure: Option<(f64, FieldJet, FieldJet)>,
}

pub struct CaseLoss<'a> {
    sets: &'a CollocationSet,
    weights: LossWeights,
    kind: CaseKind,
    physics: Physics,
    n_dirichlet: usize,
    n_neumann: usize,
}

impl<'a> CaseLoss<'a> {
    pub fn new(case: &CaseSpec, sets: &'a CollocationSet, weights: LossWeights) -> Result<Self> {
        weights.validate()?;
        if sets.input_dim != case.kind.input_dim() {
            return Err(Error::Dimension { expected: case.kind.input_dim(), actual: sets.input_dim });
        }
        let norm = case.normalization();
        let physics = match case.kind {
            CaseKind::Column1D => {
                let ux = case.transport.velocity.map_or(0.0, |u| u[0]);
                let d = case.transport.dispersion_xy(ux.abs())[0];
                Physics::Uniform(AdeCoefficients::new_1d(ux, d, &norm))
            }
            CaseKind::Uniform2D => {
                let u = case.transport.velocity.unwrap_or([0.0, 0.0]);
                let d = case.transport.dispersion_xy(u[0].hypot(u[1]));
                Physics::Uniform(AdeCoefficients::new_2d(u, d, &norm))
            }
            CaseKind::Darcy2D => {
                let perm = case
                    .permeability
                    .as_ref()
                    .ok_or_else(|| Error::Config("permeability field missing".into()))?;
                let mut zeta = Vec::with_capacity(sets.n_interior());
                for p in sets.interior.chunks_exact(3) {
                    zeta.push(perm.zeta(
                        case.transport.mu_phi,
                        p[0] * norm.length_x,
                        p[1] * norm.length_y,
                    )?);
                }
                let pressure = zeta.iter().map(|(z, g)| PressureCoefficients::new(*z, *g, &norm)).collect();
                Physics::Darcy { transport: case.transport.clone(), norm, zeta, pressure }
            }
        };
        let mut n_dirichlet = 0;
        let mut n_neumann = 0;
        for bp in &sets.boundary_targets {
            match bp.concentration {
                Constraint::Value(_) => n_dirichlet += 1,
                Constraint::Normal { .. } => n_neumann += 1,
            }
            n_dirichlet += usize::from(bp.pressure.is_some());
        }
        Ok(Self { sets, weights, kind: case.kind, physics, n_dirichlet, n_neumann })
    }

    pub fn weights(&self) -> LossWeights {
        self.weights
    }

    pub fn sets(&self) -> &CollocationSet {
        self.sets
    }

    fn residuals(&self, index: usize, jet: &Jet) -> Residuals {
        let ci = self.kind.concentration_output();
        match &self.physics {
            Physics::Uniform(coef) => Residuals {
                concentration: coef.residual(jet.field(ci)),
                d_concentration: coef.gradient(),
                pressure: None,
            },
            Physics::Darcy { transport, norm, zeta, pressure } => {
                let (z, _) = zeta[index];
                let r = residual_ade_darcy(jet.field(ci), jet.field(0), z, transport, norm);
                let pc = &pressure[index];
                Residuals {
                    concentration: r.value,
                    d_concentration: r.d_concentration,
                    pressure: Some((pc.residual(jet.field(0)), pc.gradient(), r.d_pressure)),
                }
            }
        }
    }

    /// Unweighted terms at `params`, with the PDE term split by equation.
    pub fn breakdown(&self, params: &ParameterSet, mode: ExecMode) -> Result<TermBreakdown> {
        let mean = |sum: f64, n: usize| if n > 0 { sum / n as f64 } else { 0.0 };
        let ci = self.kind.concentration_output();
        let mut out = TermBreakdown::default();

        let jets = eval_jets(params, &self.sets.interior, self.block_plan(BLOCK_PDE), mode)?;
        let (mut sp, mut sc) = (0.0, 0.0);
        for (i, jet) in jets.iter().enumerate() {
            let r = self.residuals(i, jet);
            sc += r.concentration * r.concentration;
            if let Some((rp, _, _)) = r.pressure {
                sp += rp * rp;
            }
        }
        let n_p = jets.len();
        out.pde_pressure = mean(sp, n_p);
        out.pde_concentration = mean(sc, n_p);
        out.pde = out.pde_pressure + out.pde_concentration;

        let jets = eval_jets(params, &self.sets.boundary, self.block_plan(BLOCK_BC), mode)?;
        let (mut sd, mut sn) = (0.0, 0.0);
        for (jet, bp) in jets.iter().zip(&self.sets.boundary_targets) {
            let c = jet.field(ci);
            match bp.concentration {
                Constraint::Value(v) => sd += (c.value - v).powi(2),
                Constraint::Normal { axis, value } => sn += (c.d1[axis] - value).powi(2),
            }
            if let Some(v) = bp.pressure {
                sd += (jet.value(0) - v).powi(2);
            }
        }
        out.boundary = mean(sd, self.n_dirichlet) + mean(sn, self.n_neumann);

        let jets = eval_jets(params, &self.sets.initial, JetPlan::values(), mode)?;
        let si: f64 = jets.iter().zip(&self.sets.initial_values).map(|(j, v)| (j.value(ci) - v).powi(2)).sum();
        out.initial = mean(si, jets.len());

        let jets = eval_jets(params, &self.sets.anchors, JetPlan::values(), mode)?;
        let sa: f64 = jets.iter().zip(&self.sets.anchor_values).map(|(j, v)| (j.value(0) - v).powi(2)).sum();
        out.data = mean(sa, jets.len());

        let w = self.weights;
        out.total = w.initial * out.initial + w.boundary * out.boundary + w.data * out.data + w.pde * out.pde;
        for (label, v) in LABELS.iter().zip([out.pde, out.boundary, out.initial, out.data]) {
            if !v.is_finite() {
                return Err(Error::Divergence { term: label.to_string() });
            }
        }
        Ok(out)
    }

    /// Converts the per-block sums returned by the gradient evaluation into
    /// unweighted terms.
    pub fn terms_from_blocks(&self, blocks: &[f64]) -> TermBreakdown {
        let w = self.weights;
        let un = |v: f64, w: f64| if w > 0.0 { v / w } else { 0.0 };
        TermBreakdown {
            pde: un(blocks[BLOCK_PDE], w.pde),
            boundary: un(blocks[BLOCK_BC], w.boundary),
            initial: un(blocks[BLOCK_IC], w.initial),
            data: un(blocks[BLOCK_DATA], w.data),
            total: blocks.iter().sum(),
            ..TermBreakdown::default()
        }
    }
}

impl JetLoss for CaseLoss<'_> {
    fn n_blocks(&self) -> usize {
        4
    }

    fn block_points(&self, block: usize) -> &[f64] {
        match block {
            BLOCK_PDE => &self.sets.interior,
            BLOCK_BC => &self.sets.boundary,
            BLOCK_IC => &self.sets.initial,
            _ => &self.sets.anchors,
        }
    }

    fn block_plan(&self, block: usize) -> JetPlan {
        match block {
            BLOCK_PDE => match self.kind {
                CaseKind::Column1D => JetPlan::with_second(&[AXIS_X]),
                _ => JetPlan::with_second(&[AXIS_X, AXIS_Y]),
            },
            BLOCK_BC if self.n_neumann > 0 => JetPlan::first_order(),
            _ => JetPlan::values(),
        }
    }

    fn block_label(&self, block: usize) -> &str {
        LABELS[block]
    }

    fn point_loss(&self, block: usize, index: usize, jet: &Jet, grad: &mut Jet) -> f64 {
        let ci = self.kind.concentration_output();
        let w = self.weights;
        match block {
            BLOCK_PDE => {
                let scale = w.pde / self.sets.n_interior() as f64;
                let r = self.residuals(index, jet);
                let mut loss = scale * r.concentration * r.concentration;
                let gc = r.d_concentration.scaled(2.0 * scale * r.concentration);
                add_field(grad.field_mut(ci), &gc);
                if let Some((rp, dp, dp_from_c)) = r.pressure {
                    loss += scale * rp * rp;
                    add_field(grad.field_mut(0), &dp.scaled(2.0 * scale * rp));
                    add_field(grad.field_mut(0), &dp_from_c.scaled(2.0 * scale * r.concentration));
                }
                loss
            }
            BLOCK_BC => {
                let bp = &self.sets.boundary_targets[index];
                let mut loss = 0.0;
                match bp.concentration {
                    Constraint::Value(v) => {
                        let s = w.boundary / self.n_dirichlet as f64;
                        let e = jet.value(ci) - v;
                        loss += s * e * e;
                        grad.field_mut(ci).value += 2.0 * s * e;
                    }
                    Constraint::Normal { axis, value } => {
                        let s = w.boundary / self.n_neumann as f64;
                        let e = jet.d1(ci, axis) - value;
                        loss += s * e * e;
                        grad.field_mut(ci).d1[axis] += 2.0 * s * e;
                    }
                }
                if let Some(v) = bp.pressure {
                    let s = w.boundary / self.n_dirichlet as f64;
                    let e = jet.value(0) - v;
                    loss += s * e * e;
                    grad.field_mut(0).value += 2.0 * s * e;
                }
                loss
            }
            BLOCK_IC => {
                let s = w.initial / self.sets.n_initial() as f64;
                let e = jet.value(ci) - self.sets.initial_values[index];
                grad.field_mut(ci).value = 2.0 * s * e;
                s * e * e
            }
            _ => {
                let s = w.data / self.sets.n_anchors() as f64;
                let e = jet.value(0) - self.sets.anchor_values[index];
                grad.field_mut(0).value = 2.0 * s * e;
                s * e * e
            }
        }
    }
}

fn add_field(target: &mut FieldJet, add: &FieldJet) {
    target.value += add.value;
    for a in 0..target.d1.len() {
        target.d1[a] += add.d1[a];
        target.d2[a] += add.d2[a];
    }
}
