use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::collocation::{sample_points, Budget, CollocationSet};
use super::lbfgs::{lbfgs_minimize, LbfgsOptions, Objective, StopReason};
use super::loss::{CaseLoss, LossWeights, TermBreakdown};
use crate::exec::ExecMode;
use crate::harness::CaseBundle;
use crate::net::{init_network, loss_gradient, predict, ParameterSet};
use crate::{Error, Result};

/// First-order steps taken before L-BFGS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warmup {
    pub steps: usize,
    pub learning_rate: f64,
}

impl Default for Warmup {
    fn default() -> Self {
        Self { steps: 500, learning_rate: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub budget: Budget,
    pub weights: LossWeights,
    pub lbfgs: LbfgsOptions,
    pub warmup: Option<Warmup>,
    pub mode: ExecMode,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            budget: Budget { interior: 1000, boundary_initial: 1000, data: 0 },
            weights: LossWeights::default(),
            lbfgs: LbfgsOptions::default(),
            warmup: None,
            mode: ExecMode::default(),
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        self.lbfgs.validate()?;
        if let Some(w) = self.warmup {
            if !(w.learning_rate > 0.0) {
                return Err(Error::Config("warm-up learning rate must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    /// Weighted total at the iterate.
    pub total: f64,
    pub best: f64,
    pub terms: TermBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub iterations: usize,
    pub warmup_steps: usize,
    pub evaluations: usize,
    pub final_loss: f64,
    /// Unweighted terms of the returned model.
    pub terms: TermBreakdown,
    pub history: Vec<HistoryRow>,
    pub converged: bool,
    pub stop_reason: String,
    pub training_seconds: f64,
    /// Wall-clock time to evaluate the model at 10⁴ points.
    pub inference_seconds_per_1e4: f64,
    pub parameters: usize,
    pub seed: u64,
}

impl TrainingReport {
    pub fn to_text(&self) -> String {
        let t = &self.terms;
        let mut s = String::new();
        let pairs: [(&str, String); 17] = [
            ("seed", self.seed.to_string()),
            ("parameters", self.parameters.to_string()),
            ("warmup_steps", self.warmup_steps.to_string()),
            ("iterations", self.iterations.to_string()),
            ("evaluations", self.evaluations.to_string()),
            ("final_loss", format!("{:e}", self.final_loss)),
            ("loss_ic", format!("{:e}", t.initial)),
            ("loss_bc", format!("{:e}", t.boundary)),
            ("loss_data", format!("{:e}", t.data)),
            ("loss_pde", format!("{:e}", t.pde)),
            ("loss_pde_pressure", format!("{:e}", t.pde_pressure)),
            ("loss_pde_concentration", format!("{:e}", t.pde_concentration)),
            ("converged", self.converged.to_string()),
            ("stop_reason", self.stop_reason.clone()),
            ("training_seconds", format!("{:.3}", self.training_seconds)),
            ("inference_seconds_per_1e4", format!("{:e}", self.inference_seconds_per_1e4)),
            ("history_rows", self.history.len().to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn history_csv(&self) -> String {
        let mut s = String::from("iteration,total,best,ic,bc,data,pde\n");
        for r in &self.history {
            let t = &r.terms;
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.iteration, r.total, r.best, t.initial, t.boundary, t.data, t.pde
            );
        }
        s
    }

    /// True when the best-so-far loss never increases along the history.
    pub fn best_is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1].best <= w[0].best)
    }
}

/// A trained network with the points it was fitted to.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: ParameterSet,
    pub sets: CollocationSet,
    pub report: TrainingReport,
}

struct LossObjective<'a> {
    params: ParameterSet,
    loss: &'a CaseLoss<'a>,
    mode: ExecMode,
    last_blocks: Vec<f64>,
    history: Vec<HistoryRow>,
    best: f64,
    iteration_offset: usize,
}

impl Objective for LossObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.params.set_flat(x)?;
        let eval = loss_gradient(&self.params, self.loss, self.mode)?;
        self.last_blocks = eval.blocks;
        Ok((eval.total, eval.gradient))
    }

    fn on_iteration(&mut self, iteration: usize, f: f64, _x: &[f64]) {
        self.best = self.best.min(f);
        self.history.push(HistoryRow {
            iteration: iteration + self.iteration_offset,
            total: f,
            best: self.best,
            terms: self.loss.terms_from_blocks(&self.last_blocks),
        });
    }
}

/// Adam steps on the loss; returns the parameters with the lowest loss seen.
fn adam_warmup(obj: &mut LossObjective<'_>, x0: Vec<f64>, warmup: Warmup) -> Result<Vec<f64>> {
    let (b1, b2, eps) = (0.9_f64, 0.999_f64, 1e-8);
    let mut x = x0;
    let mut m = vec![0.0; x.len()];
    let mut v = vec![0.0; x.len()];
    let mut best = (f64::INFINITY, x.clone());
    for step in 1..=warmup.steps {
        let (f, g) = obj.evaluate(&x)?;
        if f < best.0 {
            best = (f, x.clone());
        }
        obj.on_iteration(step - 1, f, &x);
        let (c1, c2) = (1.0 - b1.powi(step as i32), 1.0 - b2.powi(step as i32));
        for i in 0..x.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            x[i] -= warmup.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
        }
    }
    let (f, _) = obj.evaluate(&x)?;
    if f < best.0 {
        best = (f, x);
    }
    Ok(best.1)
}

/// Time to evaluate the model at 10⁴ random points; best of three runs.
pub fn inference_time(params: &ParameterSet, mode: ExecMode) -> Result<f64> {
    let n_in = params.config().input_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let points: Vec<f64> = (0..10_000 * n_in).map(|_| rng.gen::<f64>()).collect();
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let t = Instant::now();
        std::hint::black_box(predict(params, &points, mode)?);
        best = best.min(t.elapsed().as_secs_f64());
    }
    Ok(best)
}

/// Samples points, optionally warms up, then runs L-BFGS.
pub fn train_case(bundle: &CaseBundle, seed: u64) -> Result<TrainedModel> {
    bundle.validate()?;
    let sets = sample_points(&bundle.case, bundle.training.budget, seed);
    let params = init_network(&bundle.network, seed)?;
    train_on(bundle, sets, params)
}

/// Trains from given points and initial parameters.
pub fn train_on(bundle: &CaseBundle, sets: CollocationSet, params: ParameterSet) -> Result<TrainedModel> {
    let opts = &bundle.training;
    let start = Instant::now();
    let loss = CaseLoss::new(&bundle.case, &sets, opts.weights)?;
    let mut obj = LossObjective {
        params: params.clone(),
        loss: &loss,
        mode: opts.mode,
        last_blocks: vec![0.0; 4],
        history: Vec::new(),
        best: f64::INFINITY,
        iteration_offset: 0,
    };
    let mut x = params.flatten();
    let mut warmup_steps = 0;
    if let Some(w) = opts.warmup.filter(|w| w.steps > 0) {
        x = adam_warmup(&mut obj, x, w)?;
        warmup_steps = w.steps;
        obj.iteration_offset = w.steps;
    }
    let mut lbfgs = opts.lbfgs.clone();
    if let Some(limit) = lbfgs.time_limit {
        lbfgs.time_limit = Some(limit.saturating_sub(start.elapsed()).max(Duration::ZERO));
    }
    let result = lbfgs_minimize(&mut obj, x, &lbfgs)?;
    let mut history = std::mem::take(&mut obj.history);
    let mut best = params;
    best.set_flat(&result.x)?;
    let terms = loss.breakdown(&best, opts.mode)?;
    let training_seconds = start.elapsed().as_secs_f64();
    if history.is_empty() {
        history.push(HistoryRow { iteration: 0, total: result.f, best: result.f, terms });
    }
    let report = TrainingReport {
        iterations: result.iterations,
        warmup_steps,
        evaluations: result.evaluations,
        final_loss: result.f,
        terms,
        history,
        converged: result.converged && result.reason == StopReason::Tolerance,
        stop_reason: result.reason.as_str().to_string(),
        training_seconds,
        inference_seconds_per_1e4: inference_time(&best, opts.mode)?,
        parameters: best.len(),
        seed: sets.seed,
    };
    Ok(TrainedModel { params: best, sets, report })
}
