use std::path::Path;
use std::process::Command;
use std::time::Instant;

use solute_pinn::exec::ExecMode;
use solute_pinn::harness::{
    evaluate_model, export_report, inference_points, parse_case_text, preset, report_text, run_case, CaseBundle,
    RunArtifacts, PRESETS,
};
use solute_pinn::net::{init_network, predict, read_checkpoint, write_checkpoint, Checkpoint};
use solute_pinn::oracles::GridField;
use solute_pinn::training::Budget;
use solute_pinn::Error;

fn smoke(name: &str) -> CaseBundle {
    let mut b = preset(name).unwrap();
    b.training.budget = Budget { interior: 500, boundary_initial: 500, data: b.training.budget.data };
    b.training.lbfgs.max_iters = 200;
    b
}

#[test]
fn every_preset_runs_at_smoke_budget() {
    for name in PRESETS {
        let b = smoke(name);
        let start = Instant::now();
        let art = run_case(&b, 3, None).unwrap();
        let secs = start.elapsed().as_secs_f64();
        println!("{name}: {secs:.1} s");
        assert!(secs < 60.0, "{name} took {secs:.1} s");
        let report = art.report.as_ref().unwrap();
        assert!(report.iterations <= 200);
        assert!(report.best_is_monotone(), "{name}");
        assert!(!art.fields.is_empty());
        for f in &art.fields {
            assert!(f.mse.is_finite(), "{name} {}", f.name);
        }
    }
}

#[test]
fn runs_are_deterministic_per_seed() {
    let mut b = smoke("case2-advection");
    b.training.lbfgs.max_iters = 30;
    b.case.grid = 21;
    let a = run_case(&b, 11, None).unwrap();
    let c = run_case(&b, 11, None).unwrap();
    assert_eq!(a.params, c.params);
    assert_eq!(a.fields, c.fields);
    let d = run_case(&b, 12, None).unwrap();
    assert_ne!(a.params, d.params);
}

#[test]
fn error_field_is_absolute_difference() {
    for name in ["case1", "case2-line", "case3"] {
        let mut b = preset(name).unwrap();
        b.case.grid = 31;
        let params = init_network(&b.network, 5).unwrap();
        let fields = evaluate_model(&b, &params, 31, ExecMode::Parallel).unwrap();
        for f in &fields {
            let mut sq = 0.0;
            for k in 0..f.error.values.len() {
                let d = f.predicted.values[k] - f.oracle.values[k];
                assert_eq!(f.error.values[k], d.abs());
                sq += d * d;
            }
            let mse = sq / f.error.values.len() as f64;
            assert!((f.mse - mse).abs() <= 1e-12 * mse.max(1e-300), "{name} {}", f.name);
        }
    }
}

#[test]
fn darcy_cases_report_pressure_velocity_and_concentration() {
    let b = preset("case4").unwrap();
    let params = init_network(&b.network, 1).unwrap();
    let fields = evaluate_model(&b, &params, 21, ExecMode::Parallel).unwrap();
    let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["P", "ux", "U", "C"]);
}

#[test]
fn artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = smoke("case2-dispersion");
    b.training.lbfgs.max_iters = 20;
    b.case.grid = 21;
    let art = run_case(&b, 2, Some(dir.path())).unwrap();

    let ck = read_checkpoint(&dir.path().join("checkpoint.bin")).unwrap();
    assert_eq!(Some(&ck.params), art.params.as_ref());
    assert_eq!(ck.seed, 2);

    let f = &art.fields[0];
    let back = GridField::read_csv(&dir.path().join("C_t1.00_predicted.csv")).unwrap();
    assert_eq!(&back, &f.predicted);
    let err = GridField::read_csv(&dir.path().join("C_t1.00_error.csv")).unwrap();
    assert_eq!(&err, &f.error);

    let history = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert!(history.starts_with("iteration,total,best,ic,bc,data,pde"));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report, report_text(&art));

    let path = dir.path().join("again.bin");
    write_checkpoint(&path, &ck).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(dir.path().join("checkpoint.bin")).unwrap());
}

fn mse_rows(text: &str) -> Vec<&str> {
    let table = text.split("[mse]\n").nth(1).unwrap();
    table.lines().skip(1).collect()
}

#[test]
fn report_has_one_row_per_field_and_snapshot() {
    let mut b = preset("case3").unwrap();
    b.case.snapshots = vec![0.5, 1.0];
    let params = init_network(&b.network, 1).unwrap();
    let fields = evaluate_model(&b, &params, 21, ExecMode::Parallel).unwrap();
    let art = RunArtifacts { case: "case3".into(), fields, ..RunArtifacts::default() };
    let text = report_text(&art);
    let rows = mse_rows(&text);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.iter().filter(|r| r.starts_with("C,")).count(), 2);
    assert!(rows.iter().any(|r| r.starts_with("C,0.5,")));

    let empty = report_text(&RunArtifacts::default());
    assert!(empty.contains("[mse]\nfield,time,mse,max_error\n"));
    assert!(mse_rows(&empty).is_empty());
    let dir = tempfile::tempdir().unwrap();
    export_report(&RunArtifacts::default(), &dir.path().join("r.txt")).unwrap();
}

#[test]
fn invalid_configs_are_validation_errors() {
    let bad = [
        "[domain]\npreset = case3\n[physics]\nvelocity_x = 1\n",
        "[domain]\npreset = case2-line\n[bc]\nleft = inlet:0.8,0.2\n",
        "[domain]\npreset = case1\n[network]\nhidden = 0,4\n",
        "[domain]\npreset = case1\n[training]\nweight_pde = -1\n",
        "[domain]\npreset = case1\n[physics]\ndiffusion_x = 0\n",
        "[domain]\npreset = case1\n[oops]\n",
    ];
    for text in bad {
        let e = parse_case_text(text, Path::new("t.ini")).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text}: {e}");
    }
    let e = parse_case_text("[domain]\npreset = case1\n[training]\nbogus = 1\n", Path::new("t.ini")).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
}

#[test]
fn inference_scales_roughly_linearly() {
    let b = preset("case3").unwrap();
    let params = init_network(&b.network, 1).unwrap();
    let small = inference_points(&b, 101).unwrap();
    let large = [small.clone(), small.clone()].concat();
    let time = |pts: &[f64]| {
        (0..5)
            .map(|_| {
                let t = Instant::now();
                predict(&params, pts, ExecMode::Parallel).unwrap();
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (t1, t2) = (time(&small), time(&large));
    assert!(t2 <= 3.0 * t1, "{t1} s for N, {t2} s for 2N");
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_solute-pinn")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let ok = cli(&["oracle", "--case", "case2-line", "--grid", "11", "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("oracle_C_t0.75.csv").exists());

    let bad = cli(&["oracle", "--case", "case9", "--out", out]);
    assert_eq!(bad.status.code(), Some(2));

    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[domain]\npreset = case1\n[network]\nomega0 = -3\n").unwrap();
    let bad = cli(&["train", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(bad.status.code(), Some(2));

    let missing = cli(&["train", "--config", "/nonexistent/case.ini", "--out", out]);
    assert_eq!(missing.status.code(), Some(4));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let unwritable = blocker.join("sub");
    let io = cli(&["fdm", "--case", "case3", "--grid", "11", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(io.status.code(), Some(4));

    let cfg = dir.path().join("nan.ini");
    std::fs::write(&cfg, "[domain]\npreset = case2-dispersion\n[network]\nomega0 = 1e300\n[training]\ninterior = 50\nboundary_initial = 50\nmax_iters = 5\n").unwrap();
    let div = cli(&["train", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(div.status.code(), Some(3), "{}", String::from_utf8_lossy(&div.stderr));

    let ck = dir.path().join("ck.bin");
    let b = preset("case2-line").unwrap();
    write_checkpoint(&ck, &Checkpoint { params: init_network(&b.network, 0).unwrap(), seed: 0 }).unwrap();
    let mismatch = cli(&["evaluate", "--case", "case1", "--checkpoint", ck.to_str().unwrap(), "--out", out]);
    assert_eq!(mismatch.status.code(), Some(2));
    let ok = cli(&["evaluate", "--case", "case2-line", "--grid", "11", "--checkpoint", ck.to_str().unwrap(), "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
}
