//! Run orchestration: train, evaluate against the reference, export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::case::{CaseBundle, CaseKind};
use super::reference::{
    evaluation_grid, fdm_case, predicted_fields, reference_fields, reference_kind, NamedField, ReferenceKind,
};
use crate::exec::ExecMode;
use crate::net::{predict, write_checkpoint, Activation, Checkpoint, ParameterSet};
use crate::oracles::{mse, pointwise_error, GridField};
use crate::training::{train_case, TrainingReport};
use crate::{Error, Result};

/// One predicted field with its reference and pointwise error.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldArtifact {
    pub name: String,
    pub time: f64,
    pub predicted: GridField,
    pub oracle: GridField,
    pub error: GridField,
    pub mse: f64,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub label: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunArtifacts {
    pub case: String,
    pub seed: u64,
    pub activation: Option<Activation>,
    pub reference: Option<ReferenceKind>,
    pub checkpoint: Option<PathBuf>,
    pub params: Option<ParameterSet>,
    pub fields: Vec<FieldArtifact>,
    pub report: Option<TrainingReport>,
    pub timing: Vec<TimingRow>,
    /// Set when training failed; the other fields hold what was produced.
    pub failure: Option<String>,
}

impl RunArtifacts {
    /// First field named `name`, optionally at `time`.
    pub fn field(&self, name: &str, time: Option<f64>) -> Option<&FieldArtifact> {
        self.fields
            .iter()
            .find(|f| f.name == name && time.is_none_or(|t| (f.time - t).abs() < 1e-12))
    }

    pub fn mse(&self, name: &str, time: Option<f64>) -> Option<f64> {
        self.field(name, time).map(|f| f.mse)
    }
}

/// Compares network predictions with the case reference on the `n`-node grid.
pub fn evaluate_model(
    bundle: &CaseBundle,
    params: &ParameterSet,
    n: usize,
    mode: ExecMode,
) -> Result<Vec<FieldArtifact>> {
    let reference = reference_fields(&bundle.case, n, mode)?;
    let predicted = predicted_fields(&bundle.case, params, n, mode)?;
    compare_fields(predicted, reference)
}

fn compare_fields(predicted: Vec<NamedField>, reference: Vec<NamedField>) -> Result<Vec<FieldArtifact>> {
    if predicted.len() != reference.len() {
        return Err(Error::Shape(format!(
            "{} predicted fields but {} reference fields",
            predicted.len(),
            reference.len()
        )));
    }
    predicted
        .into_iter()
        .zip(reference)
        .map(|(p, r)| {
            if p.name != r.name {
                return Err(Error::Shape(format!("field {} paired with {}", p.name, r.name)));
            }
            let error = pointwise_error(&p.field, &r.field)?;
            Ok(FieldArtifact {
                name: p.name,
                time: p.field.time,
                mse: mse(&p.field, &r.field)?,
                max_error: error.max_abs(),
                predicted: p.field,
                oracle: r.field,
                error,
            })
        })
        .collect()
}

/// Trains `bundle` with `seed`, evaluates it and, when `out_dir` is given,
/// writes the checkpoint, fields and report there. A training failure still
/// writes the report before the error is returned.
pub fn run_case(bundle: &CaseBundle, seed: u64, out_dir: Option<&Path>) -> Result<RunArtifacts> {
    bundle.validate()?;
    let mut art = RunArtifacts {
        case: bundle.case.name.clone(),
        seed,
        activation: Some(bundle.network.activation),
        reference: Some(reference_kind(&bundle.case)),
        ..RunArtifacts::default()
    };
    let mode = bundle.training.mode;
    let model = match train_case(bundle, seed) {
        Ok(m) => m,
        Err(e) => {
            art.failure = Some(e.to_string());
            if let Some(dir) = out_dir {
                write_artifacts(&art, dir)?;
            }
            return Err(e);
        }
    };
    art.timing.push(TimingRow { label: "training".into(), seconds: model.report.training_seconds });

    let start = Instant::now();
    art.fields = evaluate_model(bundle, &model.params, bundle.case.grid, mode)?;
    art.timing.push(TimingRow { label: "evaluation".into(), seconds: start.elapsed().as_secs_f64() });
    art.report = Some(model.report);

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("checkpoint.bin");
        write_checkpoint(&path, &Checkpoint { params: model.params.clone(), seed })?;
        art.checkpoint = Some(path);
    }
    art.params = Some(model.params);
    if let Some(dir) = out_dir {
        write_artifacts(&art, dir)?;
    }
    Ok(art)
}

/// File stem of a field: name, time (or `xt` for the 1D space-time grid).
pub fn field_stem(case_kind: Option<CaseKind>, f: &FieldArtifact) -> String {
    match case_kind {
        Some(CaseKind::Column1D) => format!("{}_xt", f.name),
        _ => format!("{}_t{:.2}", f.name, f.time),
    }
}

pub fn export_field(field: &GridField, path: &Path) -> Result<()> {
    field.write_csv(path)
}

/// Writes every field (predicted, oracle, error), the report and the loss
/// history into `dir`.
pub fn write_artifacts(art: &RunArtifacts, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let kind = art.params.as_ref().map(|p| match p.config().input_dim {
        2 => CaseKind::Column1D,
        _ => CaseKind::Uniform2D,
    });
    for f in &art.fields {
        let stem = field_stem(kind, f);
        export_field(&f.predicted, &dir.join(format!("{stem}_predicted.csv")))?;
        export_field(&f.oracle, &dir.join(format!("{stem}_oracle.csv")))?;
        export_field(&f.error, &dir.join(format!("{stem}_error.csv")))?;
    }
    export_report(art, &dir.join("report.txt"))?;
    if let Some(r) = &art.report {
        let path = dir.join("history.csv");
        fs::write(&path, r.history_csv()).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Structured text: `key=value` lines, then an MSE table with one row per
/// field and time.
pub fn report_text(art: &RunArtifacts) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case={}", art.case);
    let _ = writeln!(s, "seed={}", art.seed);
    if let Some(a) = art.activation {
        let _ = writeln!(s, "activation={a}");
    }
    if let Some(r) = art.reference {
        let _ = writeln!(s, "reference={}", r.as_str());
    }
    if let Some(p) = &art.checkpoint {
        let _ = writeln!(s, "checkpoint={}", p.display());
    }
    if let Some(f) = &art.failure {
        let _ = writeln!(s, "failure={f}");
    }
    if let Some(r) = &art.report {
        s.push_str(&r.to_text());
    }
    for t in &art.timing {
        let _ = writeln!(s, "time_{}={:.6}", t.label, t.seconds);
    }
    s.push_str("\n[mse]\nfield,time,mse,max_error\n");
    for f in &art.fields {
        let _ = writeln!(s, "{},{},{:e},{:e}", f.name, f.time, f.mse, f.max_error);
    }
    s
}

pub fn export_report(art: &RunArtifacts, path: &Path) -> Result<()> {
    fs::write(path, report_text(art)).map_err(|e| Error::io(path, e))
}

/// Sine and tanh runs of one case over a set of seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationComparison {
    pub runs: Vec<RunArtifacts>,
}

impl ActivationComparison {
    /// Largest pointwise error of field `name` over all runs with
    /// `activation`.
    pub fn max_error(&self, activation: Activation, name: &str) -> Option<f64> {
        self.runs
            .iter()
            .filter(|r| r.activation == Some(activation))
            .flat_map(|r| r.fields.iter().filter(|f| f.name == name))
            .map(|f| f.max_error)
            .reduce(f64::max)
    }

    pub fn worst_mse(&self, activation: Activation, name: &str) -> Option<f64> {
        self.runs
            .iter()
            .filter(|r| r.activation == Some(activation))
            .flat_map(|r| r.fields.iter().filter(|f| f.name == name))
            .map(|f| f.mse)
            .reduce(f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("activation,seed,field,time,mse,max_error\n");
        for r in &self.runs {
            let a = r.activation.map_or("?", Activation::as_str);
            for f in &r.fields {
                let _ = writeln!(s, "{a},{},{},{},{:e},{:e}", r.seed, f.name, f.time, f.mse, f.max_error);
            }
            if let Some(fail) = &r.failure {
                let _ = writeln!(s, "{a},{},failed,,,{fail}", r.seed);
            }
        }
        s
    }
}

/// Trains sine and tanh twins with identical budgets and seeds. Runs that
/// fail to train are kept with their failure message.
pub fn compare_activations(
    bundle: &CaseBundle,
    seeds: &[u64],
    out_dir: Option<&Path>,
) -> Result<ActivationComparison> {
    if bundle.case.kind != CaseKind::Darcy2D {
        return Err(Error::Config("activation comparison needs a coupled 2D case".into()));
    }
    let mut runs = Vec::new();
    for activation in [Activation::Sine, Activation::Tanh] {
        let twin = bundle.clone().with_activation(activation);
        for &seed in seeds {
            let dir = out_dir.map(|d| d.join(format!("{activation}_seed{seed}")));
            match run_case(&twin, seed, dir.as_deref()) {
                Ok(a) => runs.push(a),
                Err(e @ (Error::Divergence { .. } | Error::Numerical(_))) => runs.push(RunArtifacts {
                    case: twin.case.name.clone(),
                    seed,
                    activation: Some(activation),
                    failure: Some(e.to_string()),
                    ..RunArtifacts::default()
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ActivationComparison { runs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub case: String,
    pub grid: usize,
    pub points: usize,
    /// Model evaluation over the grid at every snapshot, training excluded.
    pub inference_seconds: f64,
    /// Pressure and transport solve on the same grid.
    pub fdm_seconds: f64,
    pub fdm_steps: usize,
    pub pressure_iterations: Option<usize>,
}

impl BenchmarkReport {
    pub fn speedup(&self) -> f64 {
        self.fdm_seconds / self.inference_seconds
    }

    pub fn to_text(&self) -> String {
        format!(
            "case,grid,points,inference_s,fdm_s,speedup,fdm_steps,pressure_iterations\n{},{},{},{:e},{:e},{:.1},{},{}\n",
            self.case,
            self.grid,
            self.points,
            self.inference_seconds,
            self.fdm_seconds,
            self.speedup(),
            self.fdm_steps,
            self.pressure_iterations.map_or(String::from("-"), |n| n.to_string())
        )
    }
}

/// Inputs for evaluating the model over the grid at every snapshot.
pub fn inference_points(bundle: &CaseBundle, n: usize) -> Result<Vec<f64>> {
    let case = &bundle.case;
    let norm = case.normalization();
    let grid = evaluation_grid(case, n)?;
    let xy = grid.sample(0.0, |_, _| 0.0)?.coordinates();
    let times: Vec<f64> = if case.snapshots.is_empty() { vec![case.horizon] } else { case.snapshots.clone() };
    let mut pts = Vec::with_capacity(3 * n * n * times.len());
    for t in times {
        for p in xy.chunks_exact(2) {
            pts.extend([p[0] / norm.length_x, p[1] / norm.length_y, t / norm.time]);
        }
    }
    Ok(pts)
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..runs.max(1) {
        let t = Instant::now();
        let out = f()?;
        best = best.min(t.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((best, last.expect("at least one run")))
}

/// Times model inference against the finite-difference solve on an `n × n`
/// grid, best of `repeats` each.
pub fn benchmark(bundle: &CaseBundle, params: &ParameterSet, n: usize, repeats: usize) -> Result<BenchmarkReport> {
    if bundle.case.kind == CaseKind::Column1D {
        return Err(Error::Config("benchmark needs a 2D case".into()));
    }
    let mode = bundle.training.mode;
    let pts = inference_points(bundle, n)?;
    let (inference_seconds, _) = best_of(repeats, || predict(params, &pts, mode))?;
    let (fdm_seconds, run) = best_of(repeats, || fdm_case(&bundle.case, n, mode))?;
    Ok(BenchmarkReport {
        case: bundle.case.name.clone(),
        grid: n,
        points: pts.len() / 3,
        inference_seconds,
        fdm_seconds,
        fdm_steps: run.transport.steps,
        pressure_iterations: run.pressure.map(|p| p.iterations),
    })
}
