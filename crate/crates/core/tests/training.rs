//! Optimiser and loss-assembly checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solute_pinn::exec::ExecMode;
use solute_pinn::harness::{preset, CaseBundle};
use solute_pinn::net::{
    forward_jet, init_network, loss_gradient, FieldJet, Jet, JetLoss, NetworkConfig, ParameterSet,
};
use solute_pinn::oracles::Face;
use solute_pinn::physics::residual_ade_1d;
use solute_pinn::training::{
    lbfgs_minimize, sample_points, train_case, BoundaryPoint, Budget, CaseLoss, CollocationSet,
    Constraint, LbfgsOptions, LossWeights, StopReason,
};
use solute_pinn::{Error, Result};

fn opts(max_iters: usize) -> LbfgsOptions {
    LbfgsOptions { max_iters, tolerance: 0.0, grad_tolerance: 1e-14, ..LbfgsOptions::default() }
}

fn quadratic(target: Vec<f64>, scale: Vec<f64>) -> impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)> {
    move |x: &[f64]| {
        let mut f = 0.0;
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            let d = x[i] - target[i];
            f += scale[i] * d * d;
            g[i] = 2.0 * scale[i] * d;
        }
        Ok((f, g))
    }
}

#[test]
fn isotropic_quadratic_converges_exactly() {
    let n = 30;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let target: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut obj = quadratic(target.clone(), vec![1.0; n]);
    let r = lbfgs_minimize(&mut obj, vec![0.0; n], &opts(n + 5)).unwrap();
    assert!(r.iterations <= n + 5);
    let err = r.x.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "max error {err:e} after {} iterations", r.iterations);
}

#[test]
fn anisotropic_quadratic_converges() {
    let n = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let target: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 + 9.0 * i as f64 / (n - 1) as f64).collect();
    let mut obj = quadratic(target.clone(), scale);
    let r = lbfgs_minimize(&mut obj, vec![0.0; n], &opts(200)).unwrap();
    let err = r.x.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "max error {err:e}");
}

#[test]
fn rosenbrock_reaches_known_minimum() {
    let mut obj = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Ok((f, g))
    };
    let r = lbfgs_minimize(&mut obj, vec![-1.2, 1.0], &opts(1000)).unwrap();
    assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?} {:?}", r.x, r.reason);
}

#[test]
fn zero_memory_still_descends() {
    let n = 8;
    let scale: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    let mut obj = quadratic(vec![1.0; n], scale);
    let o = LbfgsOptions { memory: 0, ..opts(50) };
    let r = lbfgs_minimize(&mut obj, vec![0.0; n], &o).unwrap();
    assert!(r.f < 0.01 * r.history[0], "{} vs {}", r.f, r.history[0]);
    assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn inconsistent_gradient_stops_without_crashing() {
    // The gradient points uphill, so no step satisfies the sufficient
    // decrease condition.
    let mut obj = |x: &[f64]| -> Result<(f64, Vec<f64>)> { Ok((x[0] * x[0], vec![-2.0 * x[0]])) };
    let r = lbfgs_minimize(&mut obj, vec![1.0], &opts(10)).unwrap();
    assert_eq!(r.reason, StopReason::LineSearchFailed);
    assert!(!r.converged);
    assert_eq!(r.x, vec![1.0]);
}

#[test]
fn nan_objective_is_divergence() {
    let mut obj = |x: &[f64]| -> Result<(f64, Vec<f64>)> { Ok((f64::NAN, vec![0.0; x.len()])) };
    let e = lbfgs_minimize(&mut obj, vec![0.0; 3], &opts(10)).unwrap_err();
    assert!(matches!(e, Error::Divergence { .. }), "{e}");
    assert_eq!(e.exit_code(), 3);
}

fn small_bundle(name: &str, iters: usize) -> CaseBundle {
    let mut b = preset(name).unwrap();
    b.training.budget = Budget { interior: 200, boundary_initial: 200, data: b.training.budget.data };
    b.training.lbfgs.max_iters = iters;
    b
}

#[test]
fn loss_terms_are_nonnegative_and_weights_linear() {
    for name in ["case1", "case2-line", "case3", "case4"] {
        let b = small_bundle(name, 0);
        let sets = sample_points(&b.case, b.training.budget, 2);
        for seed in 0..3 {
            let params = init_network(&b.network, seed).unwrap();
            let w = b.training.weights;
            let base = CaseLoss::new(&b.case, &sets, w).unwrap();
            let t = base.breakdown(&params, ExecMode::Sequential).unwrap();
            for v in [t.initial, t.boundary, t.data, t.pde, t.pde_pressure, t.pde_concentration] {
                assert!(v >= 0.0, "{name}: negative term {t:?}");
            }
            let doubled = LossWeights { pde: 2.0 * w.pde, ..w };
            let t2 = CaseLoss::new(&b.case, &sets, doubled).unwrap().breakdown(&params, ExecMode::Sequential).unwrap();
            assert_eq!((t2.initial, t2.boundary, t2.data, t2.pde), (t.initial, t.boundary, t.data, t.pde));
            let added = t2.total - t.total;
            assert!((added - w.pde * t.pde).abs() <= 1e-12 * t2.total, "{name}: {added} vs {}", w.pde * t.pde);

            let eval = loss_gradient(&params, &base, ExecMode::Sequential).unwrap();
            assert!((eval.total - t.total).abs() <= 1e-10 * t.total, "{name}: {} vs {}", eval.total, t.total);
        }
    }
}

fn empty_set(input_dim: usize) -> CollocationSet {
    CollocationSet {
        input_dim,
        interior: Vec::new(),
        boundary: Vec::new(),
        boundary_targets: Vec::new(),
        initial: Vec::new(),
        initial_values: Vec::new(),
        anchors: Vec::new(),
        anchor_values: Vec::new(),
        seed: 0,
    }
}

#[test]
fn single_point_pde_term_is_the_squared_residual() {
    let b = preset("case1").unwrap();
    let params = init_network(&b.network, 11).unwrap();
    let mut sets = empty_set(2);
    sets.interior = vec![0.37, 0.61];
    let loss = CaseLoss::new(&b.case, &sets, LossWeights::default()).unwrap();
    let t = loss.breakdown(&params, ExecMode::Sequential).unwrap();
    let jet = forward_jet(&params, &sets.interior).unwrap();
    let r = residual_ade_1d(jet.field(0), &b.case.transport, &b.case.normalization());
    assert!((t.pde - r * r).abs() <= 1e-12 * r * r, "{} vs {}", t.pde, r * r);
    assert_eq!(t.total, t.pde);
}

#[test]
fn zero_network_matching_zero_initial_state_has_zero_loss() {
    let b = preset("case1").unwrap();
    let params = ParameterSet::zeros(&b.network).unwrap();
    let mut sets = empty_set(2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        sets.initial.extend([rng.gen::<f64>(), 0.0]);
        sets.initial_values.push(0.0);
    }
    let loss = CaseLoss::new(&b.case, &sets, LossWeights::default()).unwrap();
    assert_eq!(loss.breakdown(&params, ExecMode::Sequential).unwrap().total, 0.0);
    let eval = loss_gradient(&params, &loss, ExecMode::Sequential).unwrap();
    assert_eq!(eval.total, 0.0);
    assert!(eval.gradient.iter().all(|g| *g == 0.0));
}

/// Decaying travelling wave `exp(-D k² t) sin(k (x - u t))`, an exact
/// solution of the 1D equation, as jets in normalised coordinates.
fn wave_jet(x_hat: f64, t_hat: f64, b: &CaseBundle) -> Jet {
    let (l, tt) = (b.case.length, b.case.horizon);
    let u = b.case.transport.velocity.unwrap()[0];
    let d = b.case.transport.diffusion_x;
    let k = 3.0;
    let (x, t) = (x_hat * l, t_hat * tt);
    let decay = (-d * k * k * t).exp();
    let (s, c) = (k * (x - u * t)).sin_cos();
    let mut jet = Jet::zeros(2, 1);
    *jet.field_mut(0) = FieldJet {
        value: decay * s,
        d1: [l * decay * k * c, tt * decay * (-d * k * k * s - u * k * c), 0.0],
        d2: [-l * l * decay * k * k * s, 0.0, 0.0],
    };
    jet
}

/// Sums `point_loss` over every block with jets from a frozen function.
fn frozen_loss(loss: &CaseLoss<'_>, jet_at: impl Fn(&[f64]) -> Jet) -> f64 {
    let mut total = 0.0;
    for block in 0..loss.n_blocks() {
        let pts = loss.block_points(block);
        for (i, p) in pts.chunks_exact(2).enumerate() {
            let jet = jet_at(p);
            let mut grad = Jet::zeros(2, 1);
            total += loss.point_loss(block, i, &jet, &mut grad);
        }
    }
    total
}

#[test]
fn exact_solution_has_negligible_loss() {
    let b = preset("case1").unwrap();
    let mut sets = empty_set(2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..300 {
        sets.interior.extend([rng.gen::<f64>(), rng.gen::<f64>()]);
    }
    for k in 0..200 {
        let x = if k % 2 == 0 { 0.0 } else { 1.0 };
        let t = rng.gen::<f64>();
        sets.boundary.extend([x, t]);
        let v = wave_jet(x, t, &b).value(0);
        let face = if x == 0.0 { Face::Left } else { Face::Right };
        sets.boundary_targets.push(BoundaryPoint { face, concentration: Constraint::Value(v), pressure: None });
    }
    for _ in 0..100 {
        let x = rng.gen::<f64>();
        sets.initial.extend([x, 0.0]);
        sets.initial_values.push(wave_jet(x, 0.0, &b).value(0));
    }
    let loss = CaseLoss::new(&b.case, &sets, LossWeights::default()).unwrap();
    let total = frozen_loss(&loss, |p| wave_jet(p[0], p[1], &b));
    assert!(total < 1e-8, "{total:e}");

    // A perturbed wave is not a solution.
    let off = frozen_loss(&loss, |p| {
        let mut j = wave_jet(p[0], p[1], &b);
        j.field_mut(0).d2[0] *= 1.1;
        j
    });
    assert!(off > 1e-3, "{off:e}");
}

#[test]
fn zero_iterations_return_the_initial_model() {
    let b = small_bundle("case1", 0);
    let m = train_case(&b, 7).unwrap();
    assert_eq!(m.params, init_network(&b.network, 7).unwrap());
    assert!(!m.report.converged);
    assert_eq!(m.report.iterations, 0);
    assert_eq!(m.report.stop_reason, "max-iterations");
}

#[test]
fn short_runs_keep_best_so_far_monotone_and_are_deterministic() {
    for name in ["case1", "case2-advection", "case3"] {
        let b = small_bundle(name, 15);
        let m = train_case(&b, 3).unwrap();
        let r = &m.report;
        assert!(r.best_is_monotone(), "{name}");
        assert!(r.final_loss <= r.history[0].total, "{name}");
        for h in &r.history {
            assert!(h.terms.initial >= 0.0 && h.terms.boundary >= 0.0 && h.terms.pde >= 0.0);
        }
        let again = train_case(&b, 3).unwrap();
        assert_eq!(again.params, m.params, "{name}");
        assert!(r.to_text().contains("iterations=15") || r.stop_reason != "max-iterations");
        assert_eq!(r.history_csv().lines().count(), r.history.len() + 1);
    }
}

#[test]
fn sequential_and_parallel_gradients_agree_bitwise() {
    let b = small_bundle("case4", 0);
    let sets = sample_points(&b.case, b.training.budget, 1);
    let loss = CaseLoss::new(&b.case, &sets, b.training.weights).unwrap();
    let params = init_network(&b.network, 1).unwrap();
    let s = loss_gradient(&params, &loss, ExecMode::Sequential).unwrap();
    let p = loss_gradient(&params, &loss, ExecMode::Parallel).unwrap();
    assert_eq!(s.total.to_bits(), p.total.to_bits());
    assert_eq!(s.gradient, p.gradient);
}

#[test]
fn tanh_network_trains_too() {
    let mut b = small_bundle("case3", 10);
    b.network = NetworkConfig::new(3, vec![16, 16], 2).with_activation(solute_pinn::net::Activation::Tanh);
    let m = train_case(&b, 0).unwrap();
    assert!(m.report.final_loss < m.report.history[0].total);
}

#[test]
fn case_loss_gradient_matches_differences() {
    for name in ["case1", "case2-advection", "case3", "case4"] {
        let b = small_bundle(name, 0);
        let sets = sample_points(&b.case, Budget { interior: 40, boundary_initial: 40, data: 4 }, 6);
        let loss = CaseLoss::new(&b.case, &sets, b.training.weights).unwrap();
        let params = init_network(&b.network, 2).unwrap();
        let eval = loss_gradient(&params, &loss, ExecMode::Sequential).unwrap();
        let x0 = params.flatten();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let k = rng.gen_range(0..x0.len());
            let h = 1e-6 * x0[k].abs().max(1e-2);
            let at = |d: f64| {
                let mut x = x0.clone();
                x[k] += d;
                let mut p = params.clone();
                p.set_flat(&x).unwrap();
                loss.breakdown(&p, ExecMode::Sequential).unwrap().total
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let rel = (fd - eval.gradient[k]).abs() / fd.abs().max(eval.gradient[k].abs()).max(1e-3 * eval.total);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "{name}: relative gradient error {worst:e}");
    }
}
