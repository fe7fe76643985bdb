//! Statistical experiments on the solver and the samplers. Every experiment
//! returns a [`TestReport`] recording its seeds, statistics and thresholds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensemble::SampleEnsemble;
use crate::grid::{trapezoid, BoundaryParams, GridField};
use crate::kernels::RobinSemigroup;
use crate::parallel::{derive_seed, map_indexed, mean, pairwise_sum, stream_rng, variance};
use crate::shesolver::{anchor, simulate_paths, simulate_she, Observable, SheState, SheStepper, SimConfig};
use crate::stationary::{
    bm_drift_ensemble, importance_sample, sample_stationary_mcmc, Estimate, McmcConfig, McmcRun,
};
use crate::{CoreError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
    /// Declared threshold, e.g. `"p > 0.01"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

impl Statistic {
    pub fn value(name: impl Into<String>, value: f64) -> Self {
        Statistic {
            name: name.into(),
            value,
            p_value: None,
            z_score: None,
            threshold: None,
            passed: None,
        }
    }

    fn z_within(name: impl Into<String>, value: f64, z: f64, bound: f64) -> Self {
        Statistic {
            z_score: Some(z),
            threshold: Some(format!("|z| < {bound}")),
            passed: Some(z.abs() < bound),
            ..Statistic::value(name, value)
        }
    }
}

/// Plain table for the CSV written next to a report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RawTable {
    pub fn new(columns: &[&str]) -> Self {
        RawTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub statistics: Vec<Statistic>,
    /// `None` for exploratory experiments without a threshold.
    pub passed: Option<bool>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub raw: RawTable,
}

impl TestReport {
    fn new(experiment: &str, parameters: serde_json::Value, seeds: &[(&str, u64)]) -> Self {
        TestReport {
            experiment: experiment.to_string(),
            parameters,
            seeds: seeds.iter().map(|(k, s)| (k.to_string(), *s)).collect(),
            statistics: Vec::new(),
            passed: None,
            notes: Vec::new(),
            raw: RawTable::default(),
        }
    }

    fn settle(&mut self) {
        let judged: Vec<bool> = self.statistics.iter().filter_map(|s| s.passed).collect();
        self.passed = if judged.is_empty() { None } else { Some(judged.iter().all(|p| *p)) };
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub const KS_MIN_SAMPLES: usize = 50;

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < KS_MIN_SAMPLES || b.len() < KS_MIN_SAMPLES {
        return Err(CoreError::Statistics(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((ne + 0.12 + 0.11 / ne) * d),
    })
}

/// Complementary Kolmogorov distribution `Q(z) = 2 sum (-1)^(k-1) exp(-2 k^2 z^2)`.
pub fn kolmogorov_q(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * z * z)).exp();
        let s = y + y.powi(9) + y.powi(25) + y.powi(49);
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / z * s).clamp(0.0, 1.0)
    } else {
        let x = (-2.0 * z * z).exp();
        (2.0 * (x - x.powi(4) + x.powi(9))).clamp(0.0, 1.0)
    }
}

/// Standard error of the mean of a correlated series from `batches` batch means.
pub fn batch_means_se(series: &[f64], batches: usize) -> f64 {
    let len = series.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| mean(&series[b * len..(b + 1) * len])).collect();
    (variance(&means) / batches as f64).sqrt()
}

/// Mean and variance of iid samples with their standard errors.
pub fn iid_moments(xs: &[f64]) -> (Estimate, Estimate) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let s2 = variance(xs);
    let m4 = mean(&xs.iter().map(|x| (x - m).powi(4)).collect::<Vec<_>>());
    (
        Estimate {
            value: m,
            standard_error: (s2 / n).sqrt(),
        },
        Estimate {
            value: s2,
            standard_error: ((m4 - s2 * s2).max(0.0) / n).sqrt(),
        },
    )
}

/// Mean and variance of a correlated series, errors from batch means.
pub fn batch_moments(xs: &[f64], batches: usize) -> (Estimate, Estimate) {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    (
        Estimate {
            value: m,
            standard_error: batch_means_se(xs, batches),
        },
        Estimate {
            value: mean(&sq),
            standard_error: batch_means_se(&sq, batches),
        },
    )
}

pub const MARGINALS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialLaw {
    /// Draw initial states from the stationary sampler.
    #[default]
    Stationary,
    /// Start every path from `h = 0`, a control that must fail.
    Flat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityConfig {
    pub cells: usize,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialLaw,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// pCN settings for `u + v > 0`, the sample count is set from `paths`.
    #[serde(default = "default_stationary_mcmc")]
    pub mcmc: McmcConfig,
}

fn default_alpha() -> f64 {
    0.01
}

fn default_workers() -> usize {
    1
}

fn default_stationary_mcmc() -> McmcConfig {
    McmcConfig::new(0.6, 2000, 25, 2001, 0)
}

impl StationarityConfig {
    pub fn new(cells: usize, horizon: f64, paths: usize, seed: u64) -> Self {
        StationarityConfig {
            cells,
            horizon,
            paths,
            seed,
            initial: InitialLaw::Stationary,
            alpha: default_alpha(),
            workers: 1,
            mcmc: default_stationary_mcmc(),
        }
    }
}

/// `n` anchored stationary samples: Brownian motion with drift when
/// `u + v = 0`, pCN otherwise.
pub fn stationary_ensemble(
    u: f64,
    v: f64,
    cells: usize,
    n: usize,
    seed: u64,
    mcmc: &McmcConfig,
) -> Result<(SampleEnsemble, Option<McmcRun>)> {
    if u + v == 0.0 {
        return Ok((bm_drift_ensemble(u, cells, n, seed), None));
    }
    let cfg = McmcConfig {
        seed,
        chains: 1,
        length: mcmc.burn_in + n * mcmc.thin,
        ..mcmc.clone()
    };
    let run = sample_stationary_mcmc(u, v, &cfg, cells)?;
    let mut ens = run.ensemble.clone();
    ens.samples.truncate(n);
    Ok((ens, Some(run)))
}

/// KS comparison of anchored marginals between a fresh time-0 stationary
/// ensemble and the SHE ensemble evolved to the horizon.
pub fn stationarity_experiment(u: f64, v: f64, cfg: &StationarityConfig) -> Result<TestReport> {
    let init_seed = derive_seed(cfg.seed, 1);
    let reference_seed = derive_seed(cfg.seed, 2);
    let noise_seed = derive_seed(cfg.seed, 3);
    let params = BoundaryParams::new(u, v);
    let mut report = TestReport::new(
        "stationarity",
        serde_json::json!({ "u": u, "v": v, "config": cfg }),
        &[("seed", cfg.seed), ("initial", init_seed), ("reference", reference_seed), ("noise", noise_seed)],
    );
    let initial: Vec<GridField> = match cfg.initial {
        InitialLaw::Flat => vec![GridField::constant(cfg.cells, 0.0); cfg.paths],
        InitialLaw::Stationary => {
            let (ens, run) = stationary_ensemble(u, v, cfg.cells, cfg.paths, init_seed, &cfg.mcmc)?;
            if let Some(run) = run {
                report.statistics.push(Statistic::value("initial acceptance rate", run.acceptance_rate));
            }
            ens.fields().collect()
        }
    };
    let (reference, _) = stationary_ensemble(u, v, cfg.cells, cfg.paths, reference_seed, &cfg.mcmc)?;
    let sim = SimConfig {
        workers: cfg.workers,
        ..SimConfig::new(cfg.cells, cfg.horizon, cfg.paths, noise_seed)
    };
    let out = simulate_paths(|i| SheState::from_h(&initial[i]), &params, &sim)?;
    let evolved = out.ensemble(0, "she");
    report.statistics.push(Statistic::value("positivity exclusion rate", out.exclusion_rate()));

    let corrected_alpha = cfg.alpha;
    report.raw = RawTable::new(&["x", "time", "value"]);
    for &x in &MARGINALS {
        let a = reference.marginal(x);
        let b = evolved.marginal(x);
        let ks = ks_two_sample(&a, &b)?;
        let p_corr = (ks.p_value * MARGINALS.len() as f64).min(1.0);
        report.statistics.push(Statistic {
            name: format!("KS x={x}"),
            value: ks.statistic,
            p_value: Some(p_corr),
            z_score: None,
            threshold: Some(format!("Bonferroni-corrected p > {corrected_alpha}")),
            passed: Some(p_corr > corrected_alpha),
        });
        report.raw.rows.extend(a.iter().map(|&h| vec![x, 0.0, h]));
        report.raw.rows.extend(b.iter().map(|&h| vec![x, evolved.time, h]));
    }
    report.notes.push(format!(
        "p-values are multiplied by {} (Bonferroni over the marginals at {:?})",
        MARGINALS.len(),
        MARGINALS
    ));
    report.settle();
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Functional {
    EndPoint,
    Max,
    Integral,
    Constant(f64),
}

impl Functional {
    /// Evaluate on an anchored field.
    pub fn eval(&self, h: &[f64]) -> f64 {
        match self {
            Functional::EndPoint => h[h.len() - 1],
            Functional::Max => h.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            Functional::Integral => trapezoid(h, 1.0 / (h.len() - 1) as f64),
            Functional::Constant(c) => *c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicConfig {
    pub cells: usize,
    pub horizon: f64,
    pub seed: u64,
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Direct samples for the ensemble mean.
    #[serde(default = "default_reference_samples")]
    pub reference_samples: usize,
    #[serde(default = "default_stationary_mcmc")]
    pub mcmc: McmcConfig,
}

fn default_batches() -> usize {
    20
}

fn default_reference_samples() -> usize {
    10_000
}

impl ErgodicConfig {
    pub fn new(cells: usize, horizon: f64, seed: u64) -> Self {
        ErgodicConfig {
            cells,
            horizon,
            seed,
            batches: default_batches(),
            reference_samples: default_reference_samples(),
            mcmc: default_stationary_mcmc(),
        }
    }
}

/// Time average of `F(anchored h_t)` along one stationary path against the
/// ensemble mean from the direct sampler.
pub fn ergodic_average(u: f64, v: f64, functional: Functional, cfg: &ErgodicConfig) -> Result<TestReport> {
    let init_seed = derive_seed(cfg.seed, 1);
    let reference_seed = derive_seed(cfg.seed, 2);
    let noise_seed = derive_seed(cfg.seed, 3);
    if cfg.batches < 2 {
        return Err(CoreError::config("batches", "need at least two batches"));
    }
    let params = BoundaryParams::new(u, v);
    let sim = SimConfig::new(cfg.cells, cfg.horizon, 1, noise_seed);
    sim.validate()?;
    let (steps, dt) = sim.steps();
    if steps < cfg.batches {
        return Err(CoreError::config("horizon", "too short for the number of batches"));
    }
    let (start, _) = stationary_ensemble(u, v, cfg.cells, 1, init_seed, &cfg.mcmc)?;
    let mut state = SheState::from_h(&start.fields().next().expect("one sample"))?;
    let stepper = SheStepper::new(&params, cfg.cells, dt, true)?;
    let mut rng = stream_rng(noise_seed, 0);
    let mut eta = vec![0.0; cfg.cells + 1];
    let mut rhs = Vec::new();
    let mut series = Vec::with_capacity(steps);
    for k in 0..steps {
        stepper.draw_noise(&mut rng, &mut eta);
        stepper
            .step(&mut state, &eta, &mut rhs)
            .map_err(|node| CoreError::NonPositive { index: node, value: k as f64 })?;
        series.push(functional.eval(&anchor(&state.h()).values));
    }
    let time_average = mean(&series);
    let batch_se = batch_means_se(&series, cfg.batches);
    let (reference, _) = stationary_ensemble(u, v, cfg.cells, cfg.reference_samples, reference_seed, &cfg.mcmc)?;
    let values: Vec<f64> = reference.samples.iter().map(|h| functional.eval(h)).collect();
    let (ens, _) = iid_moments(&values);
    let se = batch_se.hypot(ens.standard_error);
    let z = if time_average == ens.value { 0.0 } else { (time_average - ens.value) / se };

    let mut report = TestReport::new(
        "ergodic",
        serde_json::json!({ "u": u, "v": v, "functional": functional, "config": cfg }),
        &[("seed", cfg.seed), ("initial", init_seed), ("reference", reference_seed), ("noise", noise_seed)],
    );
    report.statistics.push(Statistic::value("time average", time_average));
    report.statistics.push(Statistic::value("batch-means SE", batch_se));
    report.statistics.push(Statistic::value("ensemble mean", ens.value));
    report.statistics.push(Statistic::value("ensemble SE", ens.standard_error));
    report.statistics.push(Statistic::z_within("time average - ensemble mean", time_average - ens.value, z, 3.0));
    let stride = (steps / 2000).max(1);
    report.raw = RawTable::new(&["t", "F"]);
    report.raw.rows = series
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(k, f)| vec![(k + 1) as f64 * dt, *f])
        .collect();
    report.settle();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub cells: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Number of points on the recorded decay curve.
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
}

fn default_curve_points() -> usize {
    50
}

/// `max_j |anchored h(j) - anchored g(j)|`.
pub fn anchored_distance(h: &GridField, g: &GridField) -> f64 {
    let (a, b) = (anchor(h), anchor(g));
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Decay curve `(t, D(t))` of two solutions driven by the same noise.
pub fn coupled_distance(
    params: &BoundaryParams,
    h0: &GridField,
    g0: &GridField,
    cfg: &CouplingConfig,
    stream: u64,
) -> Result<Vec<(f64, f64)>> {
    if h0.cells() != cfg.cells || g0.cells() != cfg.cells {
        return Err(CoreError::config("cells", "initial states must share the configured grid"));
    }
    let sim = SimConfig::new(cfg.cells, cfg.horizon, 1, cfg.seed);
    sim.validate()?;
    let (steps, dt) = sim.steps();
    let stepper = SheStepper::new(params, cfg.cells, dt, true)?;
    let mut a = SheState::from_h(h0)?;
    let mut b = SheState::from_h(g0)?;
    let mut rng = stream_rng(cfg.seed, stream);
    let mut eta = vec![0.0; cfg.cells + 1];
    let mut rhs = Vec::new();
    let every = (steps / cfg.curve_points.max(1)).max(1);
    let mut curve = vec![(0.0, anchored_distance(h0, g0))];
    for k in 1..=steps {
        stepper.draw_noise(&mut rng, &mut eta);
        for s in [&mut a, &mut b] {
            stepper
                .step(s, &eta, &mut rhs)
                .map_err(|node| CoreError::NonPositive { index: node, value: 0.0 })?;
        }
        if k % every == 0 || k == steps {
            curve.push((k as f64 * dt, anchored_distance(&a.h(), &b.h())));
        }
    }
    curve.dedup_by(|x, y| x.0 == y.0);
    Ok(curve)
}

/// Exploratory: decay of the anchored distance under shared noise, repeated
/// over `repeats` noise streams.
pub fn coupling_experiment(
    u: f64,
    v: f64,
    h0: &GridField,
    g0: &GridField,
    cfg: &CouplingConfig,
    repeats: usize,
    workers: usize,
) -> Result<TestReport> {
    let params = BoundaryParams::new(u, v);
    let curves = map_indexed(repeats.max(1), workers, |r| coupled_distance(&params, h0, g0, cfg, r as u64))?;
    let curves: Vec<Vec<(f64, f64)>> = curves.into_iter().collect::<Result<_>>()?;
    let decayed = curves.iter().filter(|c| c.last().unwrap().1 < c[0].1).count();
    let mut report = TestReport::new(
        "coupling",
        serde_json::json!({ "u": u, "v": v, "repeats": repeats, "config": cfg }),
        &[("seed", cfg.seed)],
    );
    report.statistics.push(Statistic::value("D(0)", curves[0][0].1));
    let finals: Vec<f64> = curves.iter().map(|c| c.last().unwrap().1).collect();
    report.statistics.push(Statistic::value("mean D(T)", mean(&finals)));
    report
        .statistics
        .push(Statistic::value("fraction with D(T) < D(0)", decayed as f64 / curves.len() as f64));
    report.notes.push("exploratory: no pass/fail threshold".into());
    report.raw = RawTable::new(&["repeat", "t", "D"]);
    for (r, c) in curves.iter().enumerate() {
        report.raw.rows.extend(c.iter().map(|(t, d)| vec![r as f64, *t, *d]));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSamplerConfig {
    pub cells: usize,
    pub seed: u64,
    pub mcmc: McmcConfig,
    pub importance_samples: usize,
    pub spde_paths: usize,
    pub spde_horizon: f64,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_cross_points")]
    pub points: Vec<f64>,
}

fn default_cross_points() -> Vec<f64> {
    vec![0.5, 1.0]
}

impl CrossSamplerConfig {
    pub fn new(cells: usize, seed: u64) -> Self {
        CrossSamplerConfig {
            cells,
            seed,
            mcmc: McmcConfig {
                chains: 4,
                ..McmcConfig::new(0.6, 2000, 10, 52_000, 0)
            },
            importance_samples: 200_000,
            spde_paths: 1500,
            spde_horizon: 2.0,
            batches: 20,
            workers: 1,
            points: default_cross_points(),
        }
    }
}

/// Mean and variance of the anchored field at `points` from pCN, importance
/// sampling and the SHE started flat, compared pairwise.
pub fn cross_sampler_experiment(u: f64, v: f64, cfg: &CrossSamplerConfig) -> Result<TestReport> {
    let mcmc_seed = derive_seed(cfg.seed, 1);
    let is_seed = derive_seed(cfg.seed, 2);
    let noise_seed = derive_seed(cfg.seed, 3);
    let mcmc_cfg = McmcConfig {
        seed: mcmc_seed,
        workers: cfg.workers,
        ..cfg.mcmc.clone()
    };
    let run = sample_stationary_mcmc(u, v, &mcmc_cfg, cfg.cells)?;
    let is = importance_sample(u, v, cfg.cells, cfg.importance_samples, is_seed, cfg.workers)?;
    let sim = SimConfig {
        workers: cfg.workers,
        ..SimConfig::new(cfg.cells, cfg.spde_horizon, cfg.spde_paths, noise_seed)
    };
    let out = simulate_she(&GridField::constant(cfg.cells, 1.0), &BoundaryParams::new(u, v), &sim)?;
    let spde = out.observable(0, Observable::Anchored);

    let mut report = TestReport::new(
        "cross-sampler",
        serde_json::json!({ "u": u, "v": v, "config": cfg }),
        &[("seed", cfg.seed), ("mcmc", mcmc_seed), ("importance", is_seed), ("noise", noise_seed)],
    );
    report.statistics.push(Statistic::value("pCN acceptance rate", run.acceptance_rate));
    report.statistics.push(Statistic::value("pCN autocorrelation time", run.autocorrelation_time));
    report.statistics.push(Statistic::value("importance ESS", is.effective_sample_size()));
    report.statistics.push(Statistic::value("positivity exclusion rate", out.exclusion_rate()));
    report.raw = RawTable::new(&["x", "sampler", "mean", "mean_se", "variance", "variance_se"]);
    let per_chain = run.ensemble.len() / mcmc_cfg.chains;
    for &x in &cfg.points {
        let j = run.ensemble.index_of(x);
        // Batch means within each chain, then combine the chains.
        let chains: Vec<(Estimate, Estimate)> = (0..mcmc_cfg.chains)
            .map(|c| {
                let s: Vec<f64> = run.ensemble.samples[c * per_chain..(c + 1) * per_chain]
                    .iter()
                    .map(|h| h[j])
                    .collect();
                batch_moments(&s, cfg.batches)
            })
            .collect();
        let combine = |pick: fn(&(Estimate, Estimate)) -> Estimate| {
            let es: Vec<Estimate> = chains.iter().map(pick).collect();
            let k = es.len() as f64;
            Estimate {
                value: pairwise_sum(&es.iter().map(|e| e.value).collect::<Vec<_>>()) / k,
                standard_error: pairwise_sum(&es.iter().map(|e| e.standard_error.powi(2)).collect::<Vec<_>>()).sqrt() / k,
            }
        };
        let mc = (combine(|c| c.0), combine(|c| c.1));
        let isr = (is.h_mean(x), is.h_variance(x));
        let col: Vec<f64> = spde.iter().map(|h| h[j]).collect();
        let sp = iid_moments(&col);
        for (code, (m, var)) in [(0.0, mc), (1.0, isr), (2.0, sp)] {
            report.raw.rows.push(vec![x, code, m.value, m.standard_error, var.value, var.standard_error]);
        }
        for (pair, a, b) in [("pCN vs IS", mc, isr), ("pCN vs SHE", mc, sp), ("IS vs SHE", isr, sp)] {
            report.statistics.push(Statistic::z_within(
                format!("{pair} mean x={x}"),
                a.0.value - b.0.value,
                a.0.z_score(&b.0),
                3.0,
            ));
            report.statistics.push(Statistic::z_within(
                format!("{pair} variance x={x}"),
                a.1.value - b.1.value,
                a.1.z_score(&b.1),
                3.0,
            ));
        }
    }
    report.notes.push("sampler codes in the CSV: 0 pCN, 1 importance sampling, 2 SHE".into());
    report.settle();
    Ok(report)
}

/// pCN with zeroed weight exponents: chain covariance of `beta` against
/// `min(x, y) / 2` on a 5 x 5 grid, plus the acceptance rate.
pub fn pcn_calibration(cfg: &McmcConfig, cells: usize, batches: usize) -> Result<TestReport> {
    let zeroed = McmcConfig {
        zero_exponents: true,
        chains: 1,
        ..cfg.clone()
    };
    let run = sample_stationary_mcmc(1.0, 1.0, &zeroed, cells)?;
    let mut report = TestReport::new(
        "pcn-calibration",
        serde_json::json!({ "config": zeroed, "cells": cells }),
        &[("seed", cfg.seed)],
    );
    let points = [0.2, 0.4, 0.6, 0.8, 1.0];
    let idx: Vec<usize> = points.iter().map(|x| run.ensemble.index_of(*x)).collect();
    let means: Vec<f64> = idx
        .iter()
        .map(|&j| mean(&run.betas.iter().map(|b| b[j]).collect::<Vec<_>>()))
        .collect();
    report.raw = RawTable::new(&["x", "y", "covariance", "se", "expected"]);
    for (a, &x) in points.iter().enumerate() {
        for (b, &y) in points.iter().enumerate().skip(a) {
            let prod: Vec<f64> = run
                .betas
                .iter()
                .map(|beta| (beta[idx[a]] - means[a]) * (beta[idx[b]] - means[b]))
                .collect();
            let cov = mean(&prod);
            let se = batch_means_se(&prod, batches);
            let expected = 0.5 * x.min(y);
            report.statistics.push(Statistic::z_within(
                format!("cov({x}, {y})"),
                cov,
                (cov - expected) / se,
                3.0,
            ));
            report.raw.rows.push(vec![x, y, cov, se, expected]);
        }
    }
    let rate = run.acceptance_rate;
    report.statistics.push(Statistic {
        threshold: Some("0.05 < rate < 0.95".into()),
        passed: Some(rate > 0.05 && rate < 0.95),
        ..Statistic::value("acceptance rate", rate)
    });
    if let Some(w) = &run.warning {
        report.notes.push(w.clone());
    }
    report.settle();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldConfig {
    pub sim: SimConfig,
    pub points: Vec<f64>,
}

impl MeanFieldConfig {
    pub fn new(cells: usize, paths: usize, seed: u64) -> Self {
        let mut sim = SimConfig::new(cells, 1.0, paths, seed);
        sim.record_times = vec![0.1, 0.5, 1.0];
        MeanFieldConfig {
            sim,
            points: vec![0.0, 0.5, 1.0],
        }
    }
}

/// Ensemble mean of `Z` against the discrete Robin semigroup applied to `z0`.
pub fn mean_field_experiment(params: &BoundaryParams, z0: &GridField, cfg: &MeanFieldConfig) -> Result<TestReport> {
    let out = simulate_she(z0, params, &cfg.sim)?;
    let semigroup = RobinSemigroup::new(params, cfg.sim.cells)?;
    let mut report = TestReport::new(
        "mean-field",
        serde_json::json!({ "params": params, "config": cfg }),
        &[("seed", cfg.sim.seed)],
    );
    report.statistics.push(Statistic::value("positivity exclusion rate", out.exclusion_rate()));
    report.raw = RawTable::new(&["t", "x", "mean", "se", "semigroup"]);
    for (k, &t) in out.times.iter().enumerate() {
        let exact = semigroup.apply(t, &z0.values)?;
        let data = out.observable(k, Observable::Z);
        for &x in &cfg.points {
            let j = z0.index_of(x);
            let col: Vec<f64> = data.iter().map(|d| d[j]).collect();
            let (m, _) = iid_moments(&col);
            let z = (m.value - exact[j]) / m.standard_error;
            report
                .statistics
                .push(Statistic::z_within(format!("mean Z t={t} x={x}"), m.value, z, 3.0));
            report.raw.rows.push(vec![t, x, m.value, m.standard_error, exact[j]]);
        }
    }
    report.settle();
    Ok(report)
}
