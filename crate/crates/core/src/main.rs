use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use solute_pinn::harness::{
    benchmark, compare_activations, evaluate_model, export_field, fdm_case, parse_case_config, preset,
    reference_fields, report_text, run_case, write_artifacts, CaseBundle, RunArtifacts,
};
use solute_pinn::net::{read_checkpoint, Activation};
use solute_pinn::training::Warmup;
use solute_pinn::{Error, Result};

#[derive(Parser)]
#[command(name = "solute-pinn", version, about = "Physics-informed sine networks for solute transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a case and compare it with its reference solution.
    Train(CaseArgs),
    /// Evaluate a saved checkpoint against the reference solution.
    Evaluate {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Write the reference fields (analytic or refined finite differences).
    Oracle(CaseArgs),
    /// Run the finite-difference solver on the evaluation grid.
    Fdm(CaseArgs),
    /// Train sine and tanh twins and compare their errors.
    Compare {
        #[command(flatten)]
        case: CaseArgs,
        /// Extra seeds beyond `--seed`.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Time model inference against the finite-difference solve.
    Bench {
        #[command(flatten)]
        case: CaseArgs,
        /// Trained checkpoint; the case is trained first when omitted.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

#[derive(Args)]
struct CaseArgs {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    case: Option<String>,
    /// Case configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Nodes per axis of the evaluation grid.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    activation: Option<Activation>,
    /// Adam steps before L-BFGS.
    #[arg(long)]
    warmup: Option<usize>,
}

impl CaseArgs {
    fn bundle(&self) -> Result<CaseBundle> {
        let mut b = match (&self.case, &self.config) {
            (Some(name), _) => preset(name)?,
            (None, Some(path)) => parse_case_config(path)?,
            (None, None) => unreachable!("clap requires one of --case and --config"),
        };
        if let Some(n) = self.grid {
            b.case.grid = n;
        }
        if let Some(a) = self.activation {
            b = b.with_activation(a);
        }
        if let Some(steps) = self.warmup {
            b.training.warmup = Some(Warmup { steps, ..b.training.warmup.unwrap_or_default() });
        }
        b.validate()?;
        Ok(b)
    }
}

fn mse_table(art: &RunArtifacts) {
    for f in &art.fields {
        println!("{:>3} t={:<6} mse={:.3e} max_error={:.3e}", f.name, f.time, f.mse, f.max_error);
    }
}

fn write_named(dir: &Path, prefix: &str, fields: &[solute_pinn::harness::NamedField]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    for f in fields {
        let path = dir.join(format!("{prefix}{}_t{:.2}.csv", f.name, f.field.time));
        export_field(&f.field, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let b = args.bundle()?;
            let art = run_case(&b, args.seed, Some(&args.out))?;
            if let Some(r) = &art.report {
                println!(
                    "{}: {} iterations, loss {:.3e} ({}), {:.1} s",
                    b.case.name, r.iterations, r.final_loss, r.stop_reason, r.training_seconds
                );
            }
            mse_table(&art);
            println!("artifacts in {}", args.out.display());
        }
        Command::Evaluate { case, checkpoint } => {
            let b = case.bundle()?;
            let ck = read_checkpoint(&checkpoint)?;
            if ck.params.config().input_dim != b.network.input_dim || ck.params.config().output_dim != b.network.output_dim {
                return Err(Error::Config("checkpoint does not match the case dimensions".into()));
            }
            let fields = evaluate_model(&b, &ck.params, b.case.grid, b.training.mode)?;
            let art = RunArtifacts {
                case: b.case.name.clone(),
                seed: ck.seed,
                activation: Some(ck.params.config().activation),
                checkpoint: Some(checkpoint),
                params: Some(ck.params),
                fields,
                ..RunArtifacts::default()
            };
            write_artifacts(&art, &case.out)?;
            mse_table(&art);
        }
        Command::Oracle(args) => {
            let b = args.bundle()?;
            let fields = reference_fields(&b.case, b.case.grid, b.training.mode)?;
            write_named(&args.out, "oracle_", &fields)?;
        }
        Command::Fdm(args) => {
            let b = args.bundle()?;
            let run = fdm_case(&b.case, b.case.grid, b.training.mode)?;
            let mut fields = Vec::new();
            if let Some(p) = run.pressure {
                println!("pressure: {} CG iterations, relative residual {:.2e}", p.iterations, p.relative_residual);
                fields.push(solute_pinn::harness::NamedField { name: "P".into(), field: p.field });
            }
            for s in run.transport.snapshots {
                fields.push(solute_pinn::harness::NamedField { name: "C".into(), field: s });
            }
            println!("transport: {} steps of {:.3e} s, {:.3} s wall", run.transport.steps, run.transport.dt, run.seconds);
            write_named(&args.out, "fdm_", &fields)?;
        }
        Command::Compare { case, seeds } => {
            let b = case.bundle()?;
            let mut all = vec![case.seed];
            all.extend(seeds.into_iter().filter(|s| *s != case.seed));
            let cmp = compare_activations(&b, &all, Some(&case.out))?;
            let text = cmp.to_text();
            let path = case.out.join("comparison.csv");
            std::fs::write(&path, &text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            print!("{text}");
        }
        Command::Bench { case, checkpoint, repeats } => {
            let b = case.bundle()?;
            let params = match checkpoint {
                Some(p) => read_checkpoint(&p)?.params,
                None => {
                    let art = run_case(&b, case.seed, Some(&case.out))?;
                    print!("{}", report_text(&art));
                    art.params.expect("successful run has parameters")
                }
            };
            let r = benchmark(&b, &params, b.case.grid, repeats)?;
            print!("{}", r.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
