//! Samplers for the stationary measure of open KPZ.
//!
//! For `u + v = 0` the anchored stationary field is a Brownian motion with
//! drift `u`. For `u + v > 0` it is `W + beta`, with `W` a variance-1/2
//! Brownian motion and `beta` distributed according to a density with
//! respect to an independent variance-1/2 Brownian motion, sampled here by
//! preconditioned Crank-Nicolson (pCN) Metropolis or importance sampling.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleHeader, SampleEnsemble};
use crate::grid::{trapezoid, BoundaryParams};
use crate::parallel::{map_indexed, mean, pairwise_sum, stream_rng};
use crate::{CoreError, Result};

/// Variance of the reference Brownian motion for `beta` and of `W`.
pub const REFERENCE_VARIANCE: f64 = 0.5;

/// Grid path with `values[0] = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub values: Vec<f64>,
    /// Variance per unit length of the reference Brownian motion.
    pub reference_variance: f64,
    /// Log of the unnormalized weight, 0 when not reweighted.
    pub log_weight: f64,
}

impl PathSample {
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn at(&self, x: f64) -> f64 {
        let n = self.cells();
        self.values[((x * n as f64).round() as usize).min(n)]
    }
}

/// Brownian path on `cells` cells with the given variance and drift.
pub fn brownian_path<R: Rng>(rng: &mut R, cells: usize, variance: f64, drift: f64) -> Vec<f64> {
    let dx = 1.0 / cells as f64;
    let sd = (variance * dx).sqrt();
    let mut h = Vec::with_capacity(cells + 1);
    h.push(0.0);
    let mut acc = 0.0;
    for _ in 0..cells {
        let z: f64 = rng.sample(StandardNormal);
        acc += drift * dx + sd * z;
        h.push(acc);
    }
    h
}

/// `n` Brownian motions (variance 1) with drift `u`; path `i` uses stream `i`.
pub fn sample_bm_drift(u: f64, cells: usize, n: usize, seed: u64) -> Vec<PathSample> {
    (0..n)
        .map(|i| PathSample {
            values: brownian_path(&mut stream_rng(seed, i as u64), cells, 1.0, u),
            reference_variance: 1.0,
            log_weight: 0.0,
        })
        .collect()
}

pub fn bm_drift_ensemble(u: f64, cells: usize, n: usize, seed: u64) -> SampleEnsemble {
    SampleEnsemble {
        header: EnsembleHeader {
            sampler: "bm-drift".into(),
            parameters: serde_json::json!({ "u": u, "v": -u }),
            seed,
            cells,
        },
        time: 0.0,
        samples: sample_bm_drift(u, cells, n, seed).into_iter().map(|p| p.values).collect(),
    }
}

/// `-2 v beta(1) - (u + v) log int_0^1 exp(-2 beta)`, trapezoid rule on the grid.
pub fn rn_log_weight(beta: &[f64], u: f64, v: f64) -> f64 {
    let n = beta.len() - 1;
    let e: Vec<f64> = beta.iter().map(|b| (-2.0 * b).exp()).collect();
    -2.0 * v * beta[n] - (u + v) * trapezoid(&e, 1.0 / n as f64).ln()
}

/// Log density of the Gaussian increments of `beta` under a Brownian motion of
/// the given variance, up to an additive constant.
pub fn reference_log_density(beta: &[f64], variance: f64) -> f64 {
    let dx = 1.0 / (beta.len() - 1) as f64;
    let sq: Vec<f64> = beta.windows(2).map(|w| (w[1] - w[0]).powi(2)).collect();
    -pairwise_sum(&sq) / (2.0 * variance * dx)
}

pub fn check_regime(u: f64, v: f64, allow_outside: bool) -> Result<()> {
    if allow_outside || BoundaryParams::new(u, v).in_proven_regime() {
        Ok(())
    } else {
        Err(CoreError::Regime { u, v })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcConfig {
    /// pCN step in (0, 1).
    pub rho: f64,
    pub burn_in: usize,
    pub thin: usize,
    /// Iterations per chain, burn-in included.
    pub length: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub chains: usize,
    #[serde(default = "one")]
    pub workers: usize,
    /// Replace both weight exponents by zero, so the target is the reference.
    #[serde(default)]
    pub zero_exponents: bool,
    #[serde(default)]
    pub allow_outside_regime: bool,
}

fn one() -> usize {
    1
}

impl McmcConfig {
    pub fn new(rho: f64, burn_in: usize, thin: usize, length: usize, seed: u64) -> Self {
        McmcConfig {
            rho,
            burn_in,
            thin,
            length,
            seed,
            chains: 1,
            workers: 1,
            zero_exponents: false,
            allow_outside_regime: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(CoreError::config("rho", format!("must lie in (0, 1), got {}", self.rho)));
        }
        if self.burn_in >= self.length {
            return Err(CoreError::config("burn_in", "must be smaller than the chain length"));
        }
        if self.thin == 0 {
            return Err(CoreError::config("thin", "must be at least 1"));
        }
        if self.chains == 0 {
            return Err(CoreError::config("chains", "need at least one chain"));
        }
        if self.workers == 0 {
            return Err(CoreError::config("workers", "need at least one worker"));
        }
        Ok(())
    }

    pub fn samples_per_chain(&self) -> usize {
        (self.length - self.burn_in).div_ceil(self.thin)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McmcRun {
    /// `h = W + beta`, chains concatenated in order.
    pub ensemble: SampleEnsemble,
    /// The retained `beta` states, aligned with `ensemble.samples`.
    pub betas: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    /// Integrated autocorrelation time of `beta(1)` in iterations, averaged over chains.
    pub autocorrelation_time: f64,
    pub warning: Option<String>,
}

struct ChainOutput {
    h: Vec<Vec<f64>>,
    betas: Vec<Vec<f64>>,
    accepted: usize,
    trace: Vec<f64>,
}

/// pCN Metropolis for `beta`, then `h = W + beta` with fresh `W` per sample.
pub fn sample_stationary_mcmc(u: f64, v: f64, cfg: &McmcConfig, cells: usize) -> Result<McmcRun> {
    cfg.validate()?;
    check_regime(u, v, cfg.allow_outside_regime)?;
    if cells < 2 {
        return Err(CoreError::config("cells", "need at least two cells"));
    }
    let (eu, ev) = if cfg.zero_exponents { (0.0, 0.0) } else { (u, v) };
    let chains = map_indexed(cfg.chains, cfg.workers, |c| run_chain(eu, ev, cfg, cells, c as u64))?;

    let iterations = (cfg.length * cfg.chains) as f64;
    let accepted: usize = chains.iter().map(|c| c.accepted).sum();
    let acceptance_rate = accepted as f64 / iterations;
    let taus: Vec<f64> = chains.iter().map(|c| integrated_autocorrelation(&c.trace)).collect();
    let autocorrelation_time = mean(&taus);
    let warning = if acceptance_rate <= 0.05 {
        Some(format!(
            "acceptance rate {acceptance_rate:.3} is below 0.05, try rho = {:.3}",
            cfg.rho / 2.0
        ))
    } else if acceptance_rate >= 0.95 {
        Some(format!(
            "acceptance rate {acceptance_rate:.3} is above 0.95, try rho = {:.3}",
            (cfg.rho * 2.0).min(0.99)
        ))
    } else {
        None
    };
    let mut h = Vec::new();
    let mut betas = Vec::new();
    for c in chains {
        h.extend(c.h);
        betas.extend(c.betas);
    }
    let ensemble = SampleEnsemble {
        header: EnsembleHeader {
            sampler: "pcn".into(),
            parameters: serde_json::json!({ "u": u, "v": v, "mcmc": cfg }),
            seed: cfg.seed,
            cells,
        },
        time: 0.0,
        samples: h,
    };
    Ok(McmcRun {
        ensemble,
        betas,
        acceptance_rate,
        autocorrelation_time,
        warning,
    })
}

fn run_chain(u: f64, v: f64, cfg: &McmcConfig, cells: usize, chain: u64) -> ChainOutput {
    let mut rng = stream_rng(cfg.seed, 2 * chain);
    let mut w_rng = stream_rng(cfg.seed, 2 * chain + 1);
    let keep = (1.0 - cfg.rho * cfg.rho).sqrt();
    let mut beta = brownian_path(&mut rng, cells, REFERENCE_VARIANCE, 0.0);
    let mut logw = rn_log_weight(&beta, u, v);
    let mut out = ChainOutput {
        h: Vec::with_capacity(cfg.samples_per_chain()),
        betas: Vec::with_capacity(cfg.samples_per_chain()),
        accepted: 0,
        trace: Vec::with_capacity(cfg.length - cfg.burn_in),
    };
    let mut proposal = vec![0.0; cells + 1];
    for it in 0..cfg.length {
        let xi = brownian_path(&mut rng, cells, REFERENCE_VARIANCE, 0.0);
        for j in 0..=cells {
            proposal[j] = keep * beta[j] + cfg.rho * xi[j];
        }
        let logw_new = rn_log_weight(&proposal, u, v);
        let log_u: f64 = rng.random::<f64>().ln();
        if log_u < logw_new - logw {
            std::mem::swap(&mut beta, &mut proposal);
            logw = logw_new;
            out.accepted += 1;
        }
        if it >= cfg.burn_in {
            out.trace.push(beta[cells]);
            if (it - cfg.burn_in) % cfg.thin == 0 {
                let w = brownian_path(&mut w_rng, cells, REFERENCE_VARIANCE, 0.0);
                out.h.push(w.iter().zip(&beta).map(|(a, b)| a + b).collect());
                out.betas.push(beta.clone());
            }
        }
    }
    out
}

/// Integrated autocorrelation time with the self-consistent window `M >= 5 tau`.
pub fn integrated_autocorrelation(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 1.0;
    }
    let m = mean(series);
    let d: Vec<f64> = series.iter().map(|x| x - m).collect();
    let c0 = pairwise_sum(&d.iter().map(|x| x * x).collect::<Vec<_>>()) / n as f64;
    if c0 == 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for lag in 1..n / 2 {
        let c: f64 = d[..n - lag].iter().zip(&d[lag..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        tau += 2.0 * c / c0;
        if lag as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Weighted reference paths: the importance-sampling oracle.
#[derive(Clone, Debug)]
pub struct ImportanceSample {
    pub betas: Vec<Vec<f64>>,
    pub log_weights: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

impl Estimate {
    /// `|self - other|` in units of the combined standard error.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let se = self.standard_error.hypot(other.standard_error);
        (self.value - other.value).abs() / se
    }
}

pub fn importance_sample(u: f64, v: f64, cells: usize, n: usize, seed: u64, workers: usize) -> Result<ImportanceSample> {
    let betas = map_indexed(n, workers, |i| {
        brownian_path(&mut stream_rng(seed, i as u64), cells, REFERENCE_VARIANCE, 0.0)
    })?;
    let log_weights = betas.iter().map(|b| rn_log_weight(b, u, v)).collect();
    Ok(ImportanceSample { betas, log_weights })
}

impl ImportanceSample {
    fn normalized_weights(&self) -> Vec<f64> {
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - top).exp()).collect();
        let s = pairwise_sum(&w);
        w.iter().map(|x| x / s).collect()
    }

    pub fn effective_sample_size(&self) -> f64 {
        let w = self.normalized_weights();
        1.0 / pairwise_sum(&w.iter().map(|x| x * x).collect::<Vec<_>>())
    }

    /// Self-normalized estimate of `E[f(beta)]` with its delta-method error.
    pub fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> Estimate {
        let w = self.normalized_weights();
        let vals: Vec<f64> = self.betas.iter().map(|b| f(b)).collect();
        let mu = pairwise_sum(&w.iter().zip(&vals).map(|(w, f)| w * f).collect::<Vec<_>>());
        let var = pairwise_sum(&w.iter().zip(&vals).map(|(w, f)| (w * (f - mu)).powi(2)).collect::<Vec<_>>());
        Estimate {
            value: mu,
            standard_error: var.sqrt(),
        }
    }

    /// Mean of `h(x) = W(x) + beta(x)`.
    pub fn h_mean(&self, x: f64) -> Estimate {
        let j = self.index_of(x);
        self.expectation(|b| b[j])
    }

    /// Variance of `h(x)`: the weighted variance of `beta(x)` plus `x / 2` from `W`.
    pub fn h_variance(&self, x: f64) -> Estimate {
        let j = self.index_of(x);
        let m = self.h_mean(x).value;
        let e = self.expectation(|b| (b[j] - m).powi(2));
        let xj = j as f64 / (self.betas[0].len() - 1) as f64;
        Estimate {
            value: e.value + REFERENCE_VARIANCE * xj,
            standard_error: e.standard_error,
        }
    }

    fn index_of(&self, x: f64) -> usize {
        let n = self.betas[0].len() - 1;
        ((x * n as f64).round() as usize).min(n)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizationOptions {
    pub zero_exponents: bool,
    pub allow_outside_regime: bool,
}

/// Monte Carlo estimate of the normalization: the reference mean of the weight.
pub fn estimate_normalization(
    u: f64,
    v: f64,
    n_samples: usize,
    seed: u64,
    cells: usize,
    opts: NormalizationOptions,
) -> Result<Estimate> {
    check_regime(u, v, opts.allow_outside_regime)?;
    if n_samples < 2 {
        return Err(CoreError::config("n_samples", "need at least two samples"));
    }
    let (eu, ev) = if opts.zero_exponents { (0.0, 0.0) } else { (u, v) };
    let w: Vec<f64> = (0..n_samples)
        .map(|i| {
            let b = brownian_path(&mut stream_rng(seed, i as u64), cells, REFERENCE_VARIANCE, 0.0);
            rn_log_weight(&b, eu, ev).exp()
        })
        .collect();
    let m = mean(&w);
    let var = crate::parallel::variance(&w);
    Ok(Estimate {
        value: m,
        standard_error: (var / n_samples as f64).sqrt(),
    })
}

/// Monte Carlo mean of `exp(-sum c_k h(x_k))` over the ensemble.
pub fn empirical_laplace(samples: &SampleEnsemble, xs: &[f64], cs: &[f64], params: &BoundaryParams) -> Result<Estimate> {
    if xs.len() != cs.len() {
        return Err(CoreError::config("cs", "need one coefficient per point"));
    }
    if let Some(c) = cs.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
        return Err(CoreError::config("cs", format!("coefficients must be non-negative, got {c}")));
    }
    if let Some(x) = xs.iter().find(|x| !(**x >= 0.0 && **x <= 1.0)) {
        return Err(CoreError::config("xs", format!("{x} is outside [0, 1]")));
    }
    let s = params.u + params.v;
    let sum: f64 = cs.iter().sum();
    if s > 0.0 {
        if sum >= params.c_uv() {
            return Err(CoreError::LaplaceDomain {
                sum,
                bound: params.c_uv(),
            });
        }
    } else if s < 0.0 {
        return Err(CoreError::Regime {
            u: params.u,
            v: params.v,
        });
    }
    if samples.len() < 2 {
        return Err(CoreError::Statistics("need at least two samples".into()));
    }
    let idx: Vec<usize> = xs.iter().map(|x| samples.index_of(*x)).collect();
    let vals: Vec<f64> = samples
        .samples
        .iter()
        .map(|h| (-idx.iter().zip(cs).map(|(&j, c)| c * h[j]).sum::<f64>()).exp())
        .collect();
    Ok(Estimate {
        value: mean(&vals),
        standard_error: (crate::parallel::variance(&vals) / vals.len() as f64).sqrt(),
    })
}
