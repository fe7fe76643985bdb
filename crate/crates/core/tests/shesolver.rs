use openkpz::kernels::RobinSemigroup;
use openkpz::parallel::{mean, variance};
use openkpz::shesolver::*;
use openkpz::stationary::sample_bm_drift;
use openkpz::{BoundaryParams, GridField};

#[test]
fn zero_noise_neumann_constant_is_invariant() {
    let mut cfg = SimConfig::new(64, 1.0, 3, 0);
    cfg.noise = false;
    cfg.record_times = vec![0.0, 0.25, 1.0];
    let out = simulate_she(&GridField::constant(64, 1.0), &BoundaryParams::new(0.5, 0.5), &cfg).unwrap();
    for k in 0..3 {
        for s in out.at(k) {
            let z = s.z_unscaled();
            assert!(z.values.iter().all(|z| (z - 1.0).abs() < 1e-13));
            let h = hopf_cole(&z).unwrap();
            let b = burgers_field(&h, &BoundaryParams::new(0.5, 0.5));
            assert!(b.values.iter().all(|v| v.abs() < 1e-10));
        }
    }
}

#[test]
fn zero_noise_run_follows_the_semigroup() {
    let p = BoundaryParams::new(0.2, 1.3);
    let z0 = GridField::from_fn(32, 0.0, |x| 1.0 + x * x);
    let mut cfg = SimConfig::new(32, 0.5, 1, 0);
    cfg.noise = false;
    let out = simulate_she(&z0, &p, &cfg).unwrap();
    let exact = RobinSemigroup::new(&p, 32).unwrap().apply(0.5, &z0.values).unwrap();
    let got = out.at(0)[0].z_unscaled();
    for (a, b) in got.values.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
    }
}

#[test]
fn mean_field_matches_robin_semigroup() {
    let p = BoundaryParams::new(0.0, 0.0);
    let z0 = GridField::from_fn(32, 0.0, |x| 1.0 + 0.5 * (std::f64::consts::PI * x).cos());
    let mut cfg = SimConfig::new(32, 0.5, 2000, 17);
    cfg.record_times = vec![0.1, 0.5];
    let out = simulate_she(&z0, &p, &cfg).unwrap();
    let sg = RobinSemigroup::new(&p, 32).unwrap();
    for (k, &t) in out.times.iter().enumerate() {
        let exact = sg.apply(t, &z0.values).unwrap();
        let data = out.observable(k, Observable::Z);
        for j in [0, 16, 32] {
            let col: Vec<f64> = data.iter().map(|d| d[j]).collect();
            let se = (variance(&col) / col.len() as f64).sqrt();
            assert!((mean(&col) - exact[j]).abs() < 3.0 * se, "t={t} j={j}");
        }
    }
}

#[test]
fn positivity_losses_are_rare() {
    let cfg = SimConfig::new(64, 1.0, 400, 5);
    let out = simulate_she(&GridField::constant(64, 1.0), &BoundaryParams::new(0.0, 0.0), &cfg).unwrap();
    assert!(out.exclusion_rate() < 0.01, "{}", out.exclusion_rate());
    assert_eq!(out.at(0).len() + out.losses.len(), 400);
}

#[test]
fn step_reports_a_non_positive_node() {
    // A noise value far beyond its scale drives the state negative.
    let p = BoundaryParams::new(0.5, 0.5);
    let stepper = SheStepper::new(&p, 4, max_stable_dt(4), true).unwrap();
    let mut state = SheState::from_z(&GridField::constant(4, 1.0)).unwrap();
    let mut rhs = Vec::new();
    let eta = [0.0, 0.0, -1e3, 0.0, 0.0];
    let node = stepper.step(&mut state, &eta, &mut rhs).unwrap_err();
    assert!(node <= 4, "{node}");
}

#[test]
fn runs_are_reproducible_and_worker_independent() {
    let p = BoundaryParams::new(0.5, -0.5);
    let mut cfg = SimConfig::new(32, 0.2, 12, 99);
    cfg.record_times = vec![0.1, 0.2];
    let z0 = GridField::constant(32, 1.0);
    let a = simulate_she(&z0, &p, &cfg).unwrap();
    let b = simulate_she(&z0, &p, &cfg).unwrap();
    cfg.workers = 3;
    let c = simulate_she(&z0, &p, &cfg).unwrap();
    assert_eq!(a.paths, b.paths);
    assert_eq!(a.paths, c.paths);
    cfg.seed = 100;
    let d = simulate_she(&z0, &p, &cfg).unwrap();
    assert_ne!(a.paths, d.paths);
}

#[test]
fn long_runs_stay_finite() {
    let cfg = SimConfig::new(64, 1e5 * max_stable_dt(64), 100, 2);
    assert_eq!(cfg.steps().0, 100_000);
    let out = simulate_she(&GridField::constant(64, 1.0), &BoundaryParams::new(0.0, 0.0), &cfg).unwrap();
    assert!(out.losses.is_empty());
    for s in out.at(0) {
        assert!(s.h().values.iter().all(|h| h.is_finite()));
    }
}

#[test]
fn invalid_initial_states_are_rejected() {
    let cfg = SimConfig::new(16, 0.1, 1, 0);
    let mut z0 = GridField::constant(16, 1.0);
    z0.values[5] = -1.0;
    let err = simulate_she(&z0, &BoundaryParams::new(0.5, 0.5), &cfg).unwrap_err();
    assert_eq!(err.to_string(), "non-positive value -1 at grid index 5");
    assert!(simulate_she(&GridField::constant(8, 1.0), &BoundaryParams::new(0.5, 0.5), &cfg).is_err());
}

/// Mean Burgers slopes next to each boundary, averaged over paths and times
/// of a stationary run.
fn boundary_residuals(cells: usize) -> (f64, f64) {
    let (u, v) = (0.5, -0.5);
    let p = BoundaryParams::new(u, v);
    let mut cfg = SimConfig::new(cells, 5.0, 4000, 4);
    cfg.record_times = (1..=100).map(|k| k as f64 * 0.05).collect();
    let init = sample_bm_drift(u, cells, 4000, 9);
    let out = simulate_paths(
        |i| SheState::from_h(&GridField::new(init[i].values.clone(), 0.0).unwrap()),
        &p,
        &cfg,
    )
    .unwrap();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for k in 0..out.times.len() {
        for s in out.at(k) {
            let b = burgers_field(&s.h(), &p);
            left.push(b.values[0]);
            right.push(b.values[cells - 1]);
        }
    }
    ((mean(&left) - u).abs(), (mean(&right) + v).abs())
}

#[test]
fn boundary_residual_shrinks_with_the_grid() {
    let (l8, r8) = boundary_residuals(8);
    let (l16, r16) = boundary_residuals(16);
    assert!(l16 < l8, "{l16} vs {l8}");
    assert!(r16 < r8, "{r16} vs {r8}");
}

#[test]
fn stationary_start_has_brownian_increments() {
    let (u, v, cells) = (0.5, -0.5, 64);
    let init = sample_bm_drift(u, cells, 1000, 31);
    let mut cfg = SimConfig::new(cells, 0.5, 1000, 32);
    cfg.record_times = vec![0.5];
    let out = simulate_paths(
        |i| SheState::from_h(&GridField::new(init[i].values.clone(), 0.0).unwrap()),
        &BoundaryParams::new(u, v),
        &cfg,
    )
    .unwrap();
    let hs = out.observable(0, Observable::H);
    for lag in [4usize, 8, 16] {
        let sq: Vec<f64> = hs.iter().map(|h| (h[32 + lag] - h[32]).powi(2)).collect();
        let ratio = mean(&sq) / (lag as f64 / cells as f64);
        assert!((0.8..=1.2).contains(&ratio), "lag {lag}: {ratio}");
    }
}
