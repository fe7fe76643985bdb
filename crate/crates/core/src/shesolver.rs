//! Monte Carlo solver for the stochastic heat equation
//! `dZ = 1/2 Z'' dt + Z xi` on `[0, 1]` with Robin boundaries, plus the
//! Hopf-Cole map to open KPZ and the Burgers field.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleHeader, SampleEnsemble};
use crate::grid::{node_weights, BoundaryParams, GridField};
use crate::kernels::robin_generator;
use crate::parallel::{map_indexed, mean, stream_rng, variance};
use crate::{CoreError, Result};

const RENORMALIZE_EVERY: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositivityPolicy {
    /// Drop the path and count it in the exclusion rate.
    #[default]
    Exclude,
    /// Fail the whole run.
    Abort,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub cells: usize,
    /// Requested time step, lowered so that it divides the horizon.
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub record_times: Vec<f64>,
    #[serde(default = "default_true")]
    pub noise: bool,
    #[serde(default)]
    pub positivity: PositivityPolicy,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_true() -> bool {
    true
}

fn default_workers() -> usize {
    1
}

impl SimConfig {
    /// Largest stable step, recording only the horizon.
    pub fn new(cells: usize, horizon: f64, paths: usize, seed: u64) -> Self {
        SimConfig {
            cells,
            dt: max_stable_dt(cells),
            horizon,
            paths,
            seed,
            record_times: vec![horizon],
            noise: true,
            positivity: PositivityPolicy::Exclude,
            workers: 1,
        }
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.cells as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 {
            return Err(CoreError::config("cells", "need at least two cells"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CoreError::config("dt", format!("must be positive, got {}", self.dt)));
        }
        let limit = max_stable_dt(self.cells);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(CoreError::config(
                "dt",
                format!("stability requires dt <= dx^2 / 2 = {limit:e}, got {:e}", self.dt),
            ));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(CoreError::config("horizon", "must be finite and non-negative"));
        }
        if self.paths == 0 {
            return Err(CoreError::config("paths", "need at least one path"));
        }
        if self.workers == 0 {
            return Err(CoreError::config("workers", "need at least one worker"));
        }
        if let Some(t) = self.record_times.iter().find(|t| !(**t >= 0.0 && **t <= self.horizon)) {
            return Err(CoreError::config("record_times", format!("{t} is outside [0, horizon]")));
        }
        Ok(())
    }

    /// Number of steps and the step actually used.
    pub fn steps(&self) -> (usize, f64) {
        if self.horizon == 0.0 {
            return (0, self.dt);
        }
        let n = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.horizon / n as f64)
    }

    fn record_steps(&self) -> Vec<usize> {
        let (n, dt) = self.steps();
        self.record_times
            .iter()
            .map(|t| ((t / dt).round() as usize).min(n))
            .collect()
    }
}

pub fn max_stable_dt(cells: usize) -> f64 {
    let dx = 1.0 / cells as f64;
    0.5 * dx * dx
}

/// `Z = exp(log_scale) * z` with `z` kept near unit size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledField {
    pub log_scale: f64,
    pub z: GridField,
}

impl ScaledField {
    pub fn time(&self) -> f64 {
        self.z.time
    }

    pub fn h(&self) -> GridField {
        GridField {
            values: self.z.values.iter().map(|z| z.ln() + self.log_scale).collect(),
            time: self.z.time,
        }
    }

    /// May overflow when `log_scale` is large.
    pub fn z_unscaled(&self) -> GridField {
        let s = self.log_scale.exp();
        GridField {
            values: self.z.values.iter().map(|z| z * s).collect(),
            time: self.z.time,
        }
    }
}

/// State of one path.
#[derive(Clone, Debug)]
pub struct SheState {
    z: Vec<f64>,
    log_scale: f64,
    time: f64,
    steps: usize,
}

impl SheState {
    pub fn from_z(z0: &GridField) -> Result<Self> {
        check_positive(&z0.values)?;
        Ok(SheState {
            z: z0.values.clone(),
            log_scale: 0.0,
            time: z0.time,
            steps: 0,
        })
    }

    pub fn from_h(h0: &GridField) -> Result<Self> {
        let top = h0.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(CoreError::Domain("initial h is not finite".into()));
        }
        Ok(SheState {
            z: h0.values.iter().map(|h| (h - top).exp()).collect(),
            log_scale: top,
            time: h0.time,
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn snapshot(&self) -> ScaledField {
        ScaledField {
            log_scale: self.log_scale,
            z: GridField {
                values: self.z.clone(),
                time: self.time,
            },
        }
    }

    pub fn h(&self) -> GridField {
        self.snapshot().h()
    }

    fn renormalize(&mut self) {
        let top = self.z.iter().cloned().fold(0.0, f64::max);
        if top > 0.0 && top.is_finite() {
            self.z.iter_mut().for_each(|z| *z /= top);
            self.log_scale += top.ln();
        }
    }
}

/// Positivity failure at `node` during `step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityLoss {
    pub path: usize,
    pub step: usize,
    pub node: usize,
}

/// Crank-Nicolson step `(I - dt/2 A) Z' = (I + dt/2 A) Z + Z eta sqrt(dt / w)`.
///
/// `w` are the control volumes of the nodes, so the half cells at the
/// boundary see twice the noise variance of interior cells.
#[derive(Clone, Debug)]
pub struct SheStepper {
    cells: usize,
    dt: f64,
    explicit: [Vec<f64>; 3],
    sub: Vec<f64>,
    sweep_upper: Vec<f64>,
    sweep_denom: Vec<f64>,
    amplitude: Vec<f64>,
}

impl SheStepper {
    pub fn new(params: &BoundaryParams, cells: usize, dt: f64, noise: bool) -> Result<Self> {
        let a = robin_generator(params, cells);
        let n = cells + 1;
        let h = 0.5 * dt;
        let band = |k: isize, sign: f64| -> Vec<f64> {
            (0..n)
                .map(|j| {
                    let col = j as isize + k;
                    if col < 0 || col >= n as isize {
                        0.0
                    } else {
                        let d = if k == 0 { 1.0 } else { 0.0 };
                        d + sign * h * a[(j, col as usize)]
                    }
                })
                .collect()
        };
        let explicit = [band(-1, 1.0), band(0, 1.0), band(1, 1.0)];
        let (sub, diag, sup) = (band(-1, -1.0), band(0, -1.0), band(1, -1.0));
        let mut sweep_upper = vec![0.0; n];
        let mut sweep_denom = vec![0.0; n];
        for j in 0..n {
            let denom = if j == 0 {
                diag[0]
            } else {
                diag[j] - sub[j] * sweep_upper[j - 1]
            };
            if denom.abs() < 1e-300 {
                return Err(CoreError::Domain("singular implicit matrix".into()));
            }
            sweep_denom[j] = denom;
            sweep_upper[j] = sup[j] / denom;
        }
        let amplitude = if noise {
            node_weights(cells).iter().map(|w| (dt / w).sqrt()).collect()
        } else {
            vec![0.0; n]
        };
        Ok(SheStepper {
            cells,
            dt,
            explicit,
            sub,
            sweep_upper,
            sweep_denom,
            amplitude,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn draw_noise<R: Rng>(&self, rng: &mut R, eta: &mut [f64]) {
        for e in eta.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
    }

    /// Advance one step; on failure returns the first non-positive node.
    pub fn step(&self, state: &mut SheState, eta: &[f64], rhs: &mut Vec<f64>) -> std::result::Result<(), usize> {
        let n = self.nodes();
        let z = &state.z;
        let [lo, mid, hi] = &self.explicit;
        rhs.clear();
        for j in 0..n {
            let mut r = mid[j] * z[j] + z[j] * eta[j] * self.amplitude[j];
            if j > 0 {
                r += lo[j] * z[j - 1];
            }
            if j + 1 < n {
                r += hi[j] * z[j + 1];
            }
            rhs.push(r);
        }
        // Thomas sweep with the factors computed in `new`.
        rhs[0] /= self.sweep_denom[0];
        for j in 1..n {
            rhs[j] = (rhs[j] - self.sub[j] * rhs[j - 1]) / self.sweep_denom[j];
        }
        for j in (0..n - 1).rev() {
            rhs[j] -= self.sweep_upper[j] * rhs[j + 1];
        }
        std::mem::swap(&mut state.z, rhs);
        state.steps += 1;
        state.time += self.dt;
        if let Some(j) = state.z.iter().position(|z| !(*z > 0.0 && z.is_finite())) {
            return Err(j);
        }
        if state.steps % RENORMALIZE_EVERY == 0 {
            state.renormalize();
        }
        Ok(())
    }
}

/// Result of an ensemble run. `paths[i]` holds the snapshots of path `i`
/// at `times`, or `None` when the path lost positivity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimOutput {
    pub config: SimConfig,
    pub params: BoundaryParams,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub paths: Vec<Option<Vec<ScaledField>>>,
    pub losses: Vec<PositivityLoss>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Z,
    H,
    Anchored,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t: f64,
    pub x: f64,
    pub mean: f64,
    pub variance: f64,
    pub n_effective: usize,
}

impl SimOutput {
    pub fn exclusion_rate(&self) -> f64 {
        self.losses.len() as f64 / self.paths.len() as f64
    }

    /// Surviving snapshots at the `k`-th record time, in path order.
    pub fn at(&self, k: usize) -> Vec<&ScaledField> {
        self.paths.iter().flatten().map(|p| &p[k]).collect()
    }

    pub fn observable(&self, k: usize, obs: Observable) -> Vec<Vec<f64>> {
        self.at(k)
            .into_iter()
            .map(|s| match obs {
                Observable::Z => s.z_unscaled().values,
                Observable::H => s.h().values,
                Observable::Anchored => anchor(&s.h()).values,
            })
            .collect()
    }

    pub fn aggregate(&self, obs: Observable) -> Vec<AggregateRow> {
        let cells = self.config.cells;
        let mut rows = Vec::new();
        for (k, &t) in self.times.iter().enumerate() {
            let data = self.observable(k, obs);
            for j in 0..=cells {
                let col: Vec<f64> = data.iter().map(|d| d[j]).collect();
                let n = col.len();
                rows.push(AggregateRow {
                    t,
                    x: j as f64 / cells as f64,
                    mean: if n > 0 { mean(&col) } else { f64::NAN },
                    variance: if n > 1 { variance(&col) } else { f64::NAN },
                    n_effective: n,
                });
            }
        }
        rows
    }

    /// Anchored `h` at the `k`-th record time.
    pub fn ensemble(&self, k: usize, sampler: &str) -> SampleEnsemble {
        let header = EnsembleHeader {
            sampler: sampler.to_string(),
            parameters: serde_json::json!({ "params": self.params, "config": self.config }),
            seed: self.config.seed,
            cells: self.config.cells,
        };
        SampleEnsemble {
            header,
            time: self.times[k],
            samples: self.observable(k, Observable::Anchored),
        }
    }
}

/// Run `cfg.paths` independent paths from the common initial state `z0`.
pub fn simulate_she(z0: &GridField, params: &BoundaryParams, cfg: &SimConfig) -> Result<SimOutput> {
    check_grid(z0, cfg)?;
    let start = SheState::from_z(z0)?;
    simulate_paths(|_| Ok(start.clone()), params, cfg)
}

/// Run `cfg.paths` paths, path `i` starting from `initial(i)` and driven by
/// noise stream `i` of `cfg.seed`.
pub fn simulate_paths<F>(initial: F, params: &BoundaryParams, cfg: &SimConfig) -> Result<SimOutput>
where
    F: Fn(usize) -> Result<SheState> + Sync + Send,
{
    cfg.validate()?;
    let (steps, dt) = cfg.steps();
    let stepper = SheStepper::new(params, cfg.cells, dt, cfg.noise)?;
    let record = cfg.record_steps();
    let runs = map_indexed(cfg.paths, cfg.workers, |i| -> Result<std::result::Result<Vec<ScaledField>, PositivityLoss>> {
        let mut state = initial(i)?;
        if state.z.len() != cfg.cells + 1 {
            return Err(CoreError::config("cells", "initial state does not match the grid"));
        }
        let mut rng = stream_rng(cfg.seed, i as u64);
        Ok(run_path(&stepper, &mut state, &mut rng, steps, &record).map_err(|(step, node)| PositivityLoss {
            path: i,
            step,
            node,
        }))
    })?;
    let mut paths = Vec::with_capacity(cfg.paths);
    let mut losses = Vec::new();
    for run in runs {
        match run? {
            Ok(p) => paths.push(Some(p)),
            Err(loss) => {
                if cfg.positivity == PositivityPolicy::Abort {
                    return Err(CoreError::NonPositive {
                        index: loss.node,
                        value: 0.0,
                    });
                }
                losses.push(loss);
                paths.push(None);
            }
        }
    }
    Ok(SimOutput {
        config: cfg.clone(),
        params: *params,
        dt,
        steps,
        times: record.iter().map(|&k| k as f64 * dt).collect(),
        paths,
        losses,
    })
}

fn run_path<R: Rng>(
    stepper: &SheStepper,
    state: &mut SheState,
    rng: &mut R,
    steps: usize,
    record: &[usize],
) -> std::result::Result<Vec<ScaledField>, (usize, usize)> {
    let mut out: Vec<Option<ScaledField>> = vec![None; record.len()];
    let mut eta = vec![0.0; stepper.nodes()];
    let mut rhs = Vec::with_capacity(stepper.nodes());
    let take = |k: usize, state: &SheState, out: &mut [Option<ScaledField>]| {
        for (slot, &r) in out.iter_mut().zip(record) {
            if r == k {
                *slot = Some(state.snapshot());
            }
        }
    };
    take(0, state, &mut out);
    for k in 1..=steps {
        stepper.draw_noise(rng, &mut eta);
        stepper.step(state, &eta, &mut rhs).map_err(|node| (k, node))?;
        take(k, state, &mut out);
    }
    Ok(out.into_iter().map(|s| s.expect("record step within horizon")).collect())
}

fn check_grid(f: &GridField, cfg: &SimConfig) -> Result<()> {
    if f.cells() != cfg.cells {
        return Err(CoreError::config(
            "cells",
            format!("initial state has {} cells, config has {}", f.cells(), cfg.cells),
        ));
    }
    Ok(())
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|z| !(*z > 0.0 && z.is_finite())) {
        Some(index) => Err(CoreError::NonPositive {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// `h = log Z`.
pub fn hopf_cole(z: &GridField) -> Result<GridField> {
    check_positive(&z.values)?;
    Ok(GridField {
        values: z.values.iter().map(|z| z.ln()).collect(),
        time: z.time,
    })
}

/// Cell-centred slopes of `h` with the boundary residuals against the
/// Neumann data `h'(0) = u`, `h'(1) = -v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurgersField {
    pub values: Vec<f64>,
    pub dx: f64,
    pub time: f64,
    pub residual_left: f64,
    pub residual_right: f64,
}

pub fn burgers_field(h: &GridField, params: &BoundaryParams) -> BurgersField {
    let dx = h.dx();
    let values: Vec<f64> = h.values.windows(2).map(|w| (w[1] - w[0]) / dx).collect();
    let n = values.len();
    BurgersField {
        residual_left: (values[0] - params.u).abs(),
        residual_right: (values[n - 1] + params.v).abs(),
        values,
        dx,
        time: h.time,
    }
}

pub fn anchor(h: &GridField) -> GridField {
    let h0 = h.values[0];
    GridField {
        values: h.values.iter().map(|v| v - h0).collect(),
        time: h.time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stability_bound_is_enforced() {
        let mut cfg = SimConfig::new(64, 0.1, 1, 0);
        assert!(cfg.validate().is_ok());
        cfg.dt *= 1.01;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().starts_with("dt:"), "{err}");
    }

    #[test]
    fn steps_divide_horizon() {
        let cfg = SimConfig::new(64, 1.0, 1, 0);
        let (n, dt) = cfg.steps();
        assert_eq!(n, 8192);
        assert!((n as f64 * dt - 1.0).abs() < 1e-12);
        let cfg = SimConfig { dt: 0.3, ..SimConfig::new(2, 1.0, 1, 0) };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hopf_cole_examples() {
        let z = GridField::constant(8, 1.0);
        assert!(hopf_cole(&z).unwrap().values.iter().all(|h| *h == 0.0));
        let z = GridField::from_fn(8, 0.0, f64::exp);
        let h = hopf_cole(&z).unwrap();
        for (j, v) in h.values.iter().enumerate() {
            assert!((v - h_x(j, 8)).abs() < 1e-15);
        }
        let mut bad = GridField::constant(8, 1.0);
        bad.values[3] = 0.0;
        assert_eq!(hopf_cole(&bad).unwrap_err(), CoreError::NonPositive { index: 3, value: 0.0 });
    }

    fn h_x(j: usize, cells: usize) -> f64 {
        j as f64 / cells as f64
    }

    #[test]
    fn burgers_of_linear_profile() {
        let h = GridField::from_fn(16, 0.0, |x| 0.5 * x + 3.0);
        let b = burgers_field(&h, &BoundaryParams::new(0.5, -0.5));
        assert_eq!(b.values.len(), 16);
        assert!(b.values.iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(b.residual_left < 1e-12 && b.residual_right < 1e-12);
    }

    #[test]
    fn anchor_properties() {
        let h = GridField::from_fn(10, 0.0, |x| (3.0 * x).sin() + 2.0);
        let a = anchor(&h);
        assert_eq!(a.values[0], 0.0);
        assert_eq!(anchor(&a), a);
        let shifted = GridField {
            values: h.values.iter().map(|v| v + 1.25).collect(),
            time: 0.0,
        };
        let b = anchor(&shifted);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_noise_neumann_keeps_constants() {
        let mut cfg = SimConfig::new(32, 0.5, 2, 1);
        cfg.noise = false;
        cfg.record_times = vec![0.1, 0.5];
        let out = simulate_she(&GridField::constant(32, 1.0), &BoundaryParams::new(0.5, 0.5), &cfg).unwrap();
        for k in 0..2 {
            for s in out.at(k) {
                assert!(s.z_unscaled().values.iter().all(|z| (z - 1.0).abs() < 1e-13));
                let b = burgers_field(&s.h(), &BoundaryParams::new(0.0, 0.0));
                assert!(b.values.iter().all(|v| v.abs() < 1e-10));
            }
        }
    }

    #[test]
    fn renormalization_keeps_h() {
        let h = GridField::from_fn(8, 0.0, |x| 800.0 + x);
        let mut s = SheState::from_h(&h).unwrap();
        assert_eq!(s.z[8], 1.0);
        s.z.iter_mut().for_each(|z| *z *= 1e-200);
        let before = s.h();
        s.renormalize();
        assert_eq!(s.z[8], 1.0);
        for (a, b) in s.h().values.iter().zip(&before.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
