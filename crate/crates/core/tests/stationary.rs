use openkpz::ensemble::{EnsembleHeader, SampleEnsemble};
use openkpz::grid::BoundaryParams;
use openkpz::parallel::{mean, variance};
use openkpz::stationary::*;
use openkpz::CoreError;

#[test]
fn brownian_with_drift_moments() {
    let u = 0.5;
    let paths = sample_bm_drift(u, 64, 10_000, 1);
    assert!(paths.iter().all(|p| p.values[0] == 0.0));
    let ends: Vec<f64> = paths.iter().map(|p| p.at(1.0)).collect();
    assert!((mean(&ends) - u).abs() < 3.0 / 100.0);
    let se = (2.0f64 / 10_000.0).sqrt();
    assert!((variance(&ends) - 1.0).abs() < 3.0 * se);
}

#[test]
fn log_weight_examples() {
    assert_eq!(rn_log_weight(&[0.0; 33], 1.0, 1.0), 0.0);
    let line: Vec<f64> = (0..=4096).map(|j| j as f64 / 4096.0).collect();
    let exact = -2.0 - 2.0 * ((1.0 - (-2.0f64).exp()) / 2.0).ln();
    assert!((rn_log_weight(&line, 1.0, 1.0) - exact).abs() < 1e-7);
    let smooth = |cells: usize| -> Vec<f64> {
        (0..=cells).map(|j| 0.7 * (2.0 * j as f64 / cells as f64).sin()).collect()
    };
    let diff = rn_log_weight(&smooth(128), 1.0, 1.0) - rn_log_weight(&smooth(256), 1.0, 1.0);
    assert!(diff.abs() < 1e-4, "{diff}");
}

#[test]
fn zeroed_chain_reproduces_the_reference() {
    let mut cfg = McmcConfig::new(0.6, 500, 10, 100_500, 3);
    cfg.zero_exponents = true;
    let run = sample_stationary_mcmc(1.0, 1.0, &cfg, 64).unwrap();
    assert_eq!(run.acceptance_rate, 1.0);
    assert!(run.warning.is_some());
    assert_eq!(run.ensemble.len(), 10_000);
    assert!(run.ensemble.samples.iter().all(|h| h[0] == 0.0));
    for x in [0.25, 0.5, 1.0] {
        let m = run.ensemble.marginal(x);
        let se = x * (2.0 / m.len() as f64).sqrt();
        // Lag-10 correlation of the thinned chain is 0.8^10, so allow a little slack.
        assert!((variance(&m) - x).abs() < 3.0 * 1.25 * se, "x={x}: {}", variance(&m));
    }
}

#[test]
fn regime_errors() {
    let cfg = McmcConfig::new(0.5, 10, 1, 100, 0);
    for (u, v) in [(0.5, -0.5), (-0.2, 0.1), (-1.5, 3.0)] {
        assert_eq!(sample_stationary_mcmc(u, v, &cfg, 16).unwrap_err(), CoreError::Regime { u, v });
        assert!(estimate_normalization(u, v, 10, 0, 16, NormalizationOptions::default()).is_err());
    }
}

fn mcmc_vs_importance(u: f64, v: f64) {
    let mut cfg = McmcConfig::new(0.6, 2000, 10, 202_000, 11);
    cfg.chains = 2;
    let run = sample_stationary_mcmc(u, v, &cfg, 64).unwrap();
    assert!(run.acceptance_rate > 0.05 && run.acceptance_rate < 0.95);
    let is = importance_sample(u, v, 64, 200_000, 12, 1).unwrap();
    let per_chain = run.ensemble.len() / 2;
    for x in [0.25, 0.5, 1.0] {
        let mut means = Vec::new();
        let mut vars = Vec::new();
        for c in 0..2 {
            let m: Vec<f64> = run.ensemble.samples[c * per_chain..(c + 1) * per_chain]
                .iter()
                .map(|h| h[run.ensemble.index_of(x)])
                .collect();
            let (a, b) = openkpz::harness::batch_moments(&m, 20);
            means.push(a);
            vars.push(b);
        }
        let pool = |e: &[Estimate]| Estimate {
            value: (e[0].value + e[1].value) / 2.0,
            standard_error: e[0].standard_error.hypot(e[1].standard_error) / 2.0,
        };
        let (m, var) = (pool(&means), pool(&vars));
        assert!(m.z_score(&is.h_mean(x)) < 3.0, "mean at {x}: {m:?} vs {:?}", is.h_mean(x));
        assert!(var.z_score(&is.h_variance(x)) < 3.0, "variance at {x}: {var:?} vs {:?}", is.h_variance(x));
    }
}

#[test]
fn samplers_agree_symmetric_boundaries() {
    mcmc_vs_importance(1.0, 1.0);
}

#[test]
fn samplers_agree_asymmetric_boundaries() {
    mcmc_vs_importance(2.0, -0.5);
}

#[test]
fn end_point_mean_is_zero_for_equal_parameters() {
    // With u = v the law is invariant under h(x) -> h(1 - x) - h(1).
    let is = importance_sample(1.0, 1.0, 64, 200_000, 5, 1).unwrap();
    let e = is.h_mean(1.0);
    assert!(e.value.abs() < 3.0 * e.standard_error, "{e:?}");
    // With v > u the end point tilts down, with u > v up.
    let down = importance_sample(0.5, 1.5, 64, 200_000, 6, 1).unwrap().h_mean(1.0);
    let up = importance_sample(1.5, 0.5, 64, 200_000, 7, 1).unwrap().h_mean(1.0);
    assert!(down.value < -3.0 * down.standard_error, "{down:?}");
    assert!(up.value > 3.0 * up.standard_error, "{up:?}");
}

#[test]
fn normalization_estimates() {
    let zeroed = NormalizationOptions {
        zero_exponents: true,
        ..Default::default()
    };
    let z = estimate_normalization(1.0, 1.0, 1000, 0, 64, zeroed).unwrap();
    assert_eq!(z.value, 1.0);
    assert!((z.value - 1.0).abs() <= 3.0 * z.standard_error);
    let a = estimate_normalization(1.0, 1.0, 20_000, 1, 64, NormalizationOptions::default()).unwrap();
    let b = estimate_normalization(1.0, 1.0, 20_000, 2, 64, NormalizationOptions::default()).unwrap();
    assert!(a.value > 0.0 && b.value > 0.0);
    assert!(a.z_score(&b) < 3.0, "{a:?} {b:?}");
}

fn ensemble(samples: Vec<Vec<f64>>, cells: usize) -> SampleEnsemble {
    let header = EnsembleHeader {
        sampler: "test".into(),
        parameters: serde_json::Value::Null,
        seed: 0,
        cells,
    };
    SampleEnsemble::new(header, 0.0, samples).unwrap()
}

#[test]
fn laplace_functional() {
    let ens = bm_drift_ensemble(0.0, 32, 10_000, 4);
    let p = BoundaryParams::new(0.0, 0.0);
    let zero = empirical_laplace(&ens, &[0.5, 1.0], &[0.0, 0.0], &p).unwrap();
    assert_eq!(zero.value, 1.0);
    let e = empirical_laplace(&ens, &[1.0], &[0.5], &p).unwrap();
    assert!((e.value - 0.125f64.exp()).abs() < 3.0 * e.standard_error, "{e:?}");

    let ens = ensemble(vec![vec![0.0; 9]; 4], 8);
    let p = BoundaryParams::new(0.5, 1.0);
    assert!((p.c_uv() - 1.0).abs() < 1e-15);
    assert!(empirical_laplace(&ens, &[0.5], &[0.99], &p).is_ok());
    assert_eq!(
        empirical_laplace(&ens, &[0.5, 1.0], &[0.5, 0.5], &p).unwrap_err(),
        CoreError::LaplaceDomain { sum: 1.0, bound: 1.0 }
    );
    assert!(empirical_laplace(&ens, &[0.5], &[-0.1], &p).is_err());
    assert!(empirical_laplace(&ens, &[0.5], &[0.1], &BoundaryParams::new(-0.5, 0.0)).is_err());
}
