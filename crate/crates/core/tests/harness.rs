use openkpz::harness::*;
use openkpz::parallel::stream_rng;
use openkpz::GridField;
use rand::Rng;
use rand_distr::StandardNormal;

fn normals(seed: u64, n: usize, shift: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|_| shift + rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Brute force `sup_x |F_a(x) - F_b(x)|` over the pooled sample.
fn ks_oracle(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|v| **v <= x).count() as f64 / s.len() as f64;
    a.iter().chain(b).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

#[test]
fn ks_calibration() {
    let a = normals(1, 1000, 0.0);
    let b = normals(2, 1000, 0.0);
    let same = ks_two_sample(&a, &b).unwrap();
    assert!((same.statistic - ks_oracle(&a, &b)).abs() < 1e-12);
    assert!(same.p_value > 0.01, "{same:?}");
    let c = normals(3, 1000, 1.0);
    let shifted = ks_two_sample(&a, &c).unwrap();
    assert!((shifted.statistic - ks_oracle(&a, &c)).abs() < 1e-12);
    assert!(shifted.p_value < 1e-6, "{shifted:?}");
    let d = normals(4, 300, 0.0);
    assert!((ks_two_sample(&a, &d).unwrap().statistic - ks_oracle(&a, &d)).abs() < 1e-12);
}

#[test]
fn stationarity_and_control_small_grid() {
    let cfg = StationarityConfig::new(32, 0.5, 400, 3);
    let report = stationarity_experiment(0.5, -0.5, &cfg).unwrap();
    assert_eq!(report.passed, Some(true), "{}", report.to_json());
    assert_eq!(report.statistics.iter().filter(|s| s.threshold.is_some()).count(), 4);

    let control = StationarityConfig {
        initial: InitialLaw::Flat,
        ..StationarityConfig::new(32, 0.02, 400, 3)
    };
    let report = stationarity_experiment(0.5, -0.5, &control).unwrap();
    assert_eq!(report.passed, Some(false));
    assert!(report.statistics.iter().any(|s| s.p_value.is_some_and(|p| p < 0.01)));
}

#[test]
fn stationarity_from_mcmc_ensemble() {
    let cfg = StationarityConfig::new(64, 1.0, 500, 8);
    let report = stationarity_experiment(1.0, 1.0, &cfg).unwrap();
    for s in report.statistics.iter().filter(|s| s.p_value.is_some()) {
        assert!(s.p_value.unwrap() > 0.01, "{}", report.to_json());
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = StationarityConfig::new(16, 0.1, 60, 5);
    let a = stationarity_experiment(0.5, -0.5, &cfg).unwrap();
    let b = stationarity_experiment(0.5, -0.5, &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.raw.to_csv(), b.raw.to_csv());
}

#[test]
fn ergodic_average_of_end_point() {
    let report = ergodic_average(0.5, -0.5, Functional::EndPoint, &ErgodicConfig::new(64, 50.0, 1)).unwrap();
    let avg = report.statistic("time average").unwrap().value;
    let se = report.statistic("batch-means SE").unwrap().value;
    assert!((avg - 0.5).abs() < 3.0 * se, "{avg} +- {se}");
    assert_eq!(report.passed, Some(true));
}

#[test]
fn ergodic_average_of_constant_is_exact() {
    let cfg = ErgodicConfig {
        reference_samples: 100,
        ..ErgodicConfig::new(16, 1.0, 2)
    };
    let report = ergodic_average(0.5, -0.5, Functional::Constant(1.75), &cfg).unwrap();
    assert_eq!(report.statistic("time average").unwrap().value, 1.75);
    assert_eq!(report.statistic("ensemble mean").unwrap().value, 1.75);
    assert_eq!(report.passed, Some(true));
}

#[test]
fn halving_the_horizon_inflates_the_error() {
    let se = |t: f64, seed: u64| {
        let cfg = ErgodicConfig {
            reference_samples: 100,
            ..ErgodicConfig::new(64, t, seed)
        };
        let r = ergodic_average(0.5, -0.5, Functional::EndPoint, &cfg).unwrap();
        r.statistic("batch-means SE").unwrap().value
    };
    let ratios: Vec<f64> = (0..4).map(|s| se(25.0, s) / se(50.0, s)).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / 4.0;
    assert!((1.05..2.0).contains(&mean_ratio), "{ratios:?}");
}

#[test]
fn coupling_trivial_cases() {
    let cfg = CouplingConfig {
        cells: 32,
        horizon: 0.3,
        seed: 4,
        curve_points: 10,
    };
    let h0 = GridField::from_fn(32, 0.0, |x| (3.0 * x).cos());
    let same = coupled_distance(&openkpz::BoundaryParams::new(0.5, -0.5), &h0, &h0, &cfg, 0).unwrap();
    assert!(same.iter().all(|(_, d)| *d == 0.0));
    let shifted = GridField {
        values: h0.values.iter().map(|h| h + 2.5).collect(),
        time: 0.0,
    };
    let d = coupled_distance(&openkpz::BoundaryParams::new(0.5, -0.5), &h0, &shifted, &cfg, 0).unwrap();
    assert!(d.iter().all(|(_, d)| *d < 1e-12), "{d:?}");
}

#[test]
fn coupling_decays_for_most_seeds() {
    let cfg = CouplingConfig {
        cells: 64,
        horizon: 1.0,
        seed: 1,
        curve_points: 10,
    };
    let h0 = GridField::constant(64, 0.0);
    let g0 = GridField::from_fn(64, 0.0, |x| (std::f64::consts::PI * x).sin());
    let report = coupling_experiment(0.5, -0.5, &h0, &g0, &cfg, 100, 1).unwrap();
    assert_eq!(report.passed, None);
    let rate = report.statistic("fraction with D(T) < D(0)").unwrap().value;
    assert!(rate >= 0.9, "{rate}");
}
