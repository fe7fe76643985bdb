//! Subcommand implementations. Every artifact embeds the resolved config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use openkpz::ensemble::{write_snapshot, EnsembleHeader, SampleEnsemble};
use openkpz::harness::{
    coupling_experiment, cross_sampler_experiment, ergodic_average, mean_field_experiment, pcn_calibration,
    stationarity_experiment, stationary_ensemble, CouplingConfig, CrossSamplerConfig, ErgodicConfig, Functional,
    InitialLaw, MeanFieldConfig, StationarityConfig, TestReport,
};
use openkpz::kernels::{constant_a, neumann_kernel, Mollifier, QuadratureResolution, RobinSemigroup};
use openkpz::shesolver::{max_stable_dt, simulate_paths, AggregateRow, Observable, PositivityPolicy, SheState, SimConfig};
use openkpz::stationary::{estimate_normalization, McmcConfig, NormalizationOptions};
use openkpz::{BoundaryParams, GridField};
use openkpz_algebra::{verify_tables, DiagramTable};

use crate::config::{resolve, Common, RawConfig};
use crate::{Cli, CliError, Command, ExperimentName};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let raw = match &cli.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let common = raw.common(cli.seed, cli.workers, cli.out_dir.clone())?;
    let opts = |path: &[&str]| raw.section(path);
    match &cli.command {
        Command::VerifyAlgebra { tables } => {
            let o: VerifyOptions = resolve(opts(&["verify-algebra"])?, cli.u, cli.v, &cli.set)?;
            verify_algebra(&common, tables.as_deref(), o)
        }
        Command::Kernel => kernel(&common, resolve(opts(&["kernel"])?, cli.u, cli.v, &cli.set)?),
        Command::ConstantA => constant(&common, resolve(opts(&["constant-a"])?, cli.u, cli.v, &cli.set)?),
        Command::Simulate => simulate(&common, resolve(opts(&["simulate"])?, cli.u, cli.v, &cli.set)?),
        Command::SampleStationary => {
            sample_stationary(&common, resolve(opts(&["sample-stationary"])?, cli.u, cli.v, &cli.set)?)
        }
        Command::Experiment { name } => {
            let section = opts(&["experiment", name.as_str()])?;
            experiment(&common, *name, section, cli)
        }
    }
}

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    workers: usize,
    options: &'a T,
}

struct Artifacts<'a> {
    dir: &'a Path,
    config: serde_json::Value,
}

impl<'a> Artifacts<'a> {
    fn new<T: Serialize>(common: &'a Common, command: &str, options: &T) -> Result<Self, CliError> {
        std::fs::create_dir_all(&common.out_dir)
            .map_err(|e| CliError::config("out_dir", format!("{}: {e}", common.out_dir.display())))?;
        let config = serde_json::to_value(Resolved {
            command,
            seed: common.seed,
            workers: common.workers,
            options,
        })
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(Artifacts { dir: &common.out_dir, config })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(path)
    }

    fn json(&self, name: &str, body: serde_json::Value) -> Result<PathBuf, CliError> {
        let mut doc = serde_json::Map::new();
        doc.insert("config".into(), self.config.clone());
        if let serde_json::Value::Object(map) = body {
            doc.extend(map);
        } else {
            doc.insert("result".into(), body);
        }
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json");
        self.write(name, &(text + "\n"))
    }

    /// CSV preceded by a `#` line holding the resolved config.
    fn csv(&self, name: &str, table: &str) -> Result<PathBuf, CliError> {
        self.write(name, &format!("# {}\n{table}", self.config))
    }
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("serializable")
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyOptions {}

fn verify_algebra(common: &Common, tables: Option<&Path>, o: VerifyOptions) -> Result<(), CliError> {
    let table = match tables {
        None => DiagramTable::standard(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config("tables", format!("cannot read {}: {e}", p.display())))?;
            DiagramTable::parse(&text).map_err(|e| CliError::config("tables", e.to_string()))?
        }
    };
    let report = verify_tables(&table);
    print!("{}", report.render());
    let art = Artifacts::new(common, "verify-algebra", &serde_json::json!({ "options": o, "tables": tables }))?;
    art.json("verify-algebra.json", serde_json::json!({ "report": report }))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{}/{} tables exact", report.tables_exact(), report.tables.len())))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct KernelOptions {
    t: f64,
    images: usize,
    /// Points per axis on [0, 1].
    points: usize,
    u: Option<f64>,
    v: Option<f64>,
    cells: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            t: 0.1,
            images: 20,
            points: 33,
            u: None,
            v: None,
            cells: 256,
        }
    }
}

fn kernel(common: &Common, o: KernelOptions) -> Result<(), CliError> {
    if o.points < 2 {
        return Err(CliError::config("points", "need at least two points"));
    }
    let robin = match (o.u, o.v) {
        (Some(u), Some(v)) => {
            if o.cells % (o.points - 1) != 0 {
                return Err(CliError::config("cells", "must be a multiple of points - 1"));
            }
            Some(RobinSemigroup::new(&BoundaryParams::new(u, v), o.cells)?.kernel(o.t)?)
        }
        (None, None) => None,
        _ => return Err(CliError::config("u, v", "give both or neither")),
    };
    let mut table = String::from(if robin.is_some() {
        "x,y,neumann,error_bound,robin\n"
    } else {
        "x,y,neumann,error_bound\n"
    });
    let step = o.cells / (o.points - 1).max(1);
    for i in 0..o.points {
        for j in 0..o.points {
            let (x, y) = (i as f64 / (o.points - 1) as f64, j as f64 / (o.points - 1) as f64);
            let k = neumann_kernel(o.t, x, y, o.images)?;
            table.push_str(&format!("{x:e},{y:e},{:e},{:e}", k.value, k.error_bound));
            if let Some(r) = &robin {
                table.push_str(&format!(",{:e}", r[(i * step, j * step)]));
            }
            table.push('\n');
        }
    }
    Artifacts::new(common, "kernel", &o)?.csv("kernel.csv", &table)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConstantOptions {
    time_radius: f64,
    space_radius: f64,
    r_cells: usize,
    z_cells: usize,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        let r = QuadratureResolution::default();
        ConstantOptions {
            time_radius: 1.0,
            space_radius: 1.0,
            r_cells: r.r_cells,
            z_cells: r.z_cells,
        }
    }
}

fn constant(common: &Common, o: ConstantOptions) -> Result<(), CliError> {
    if o.r_cells == 0 || o.z_cells == 0 {
        return Err(CliError::config("r_cells, z_cells", "must be positive"));
    }
    let m = Mollifier::bump(o.time_radius, o.space_radius);
    let a = constant_a(
        &m,
        QuadratureResolution {
            r_cells: o.r_cells,
            z_cells: o.z_cells,
        },
    )?;
    println!("a = {:.12} (error estimate {:.1e})", a.value, a.error_estimate);
    Artifacts::new(common, "constant-a", &o)?.json("constant-a.json", serde_json::json!({ "a": a }))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum InitialProfile {
    /// `h = 0`.
    Flat,
    /// `h = sin(pi x)`.
    Sine,
    /// Independent draws from the stationary sampler.
    Stationary,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimulateOptions {
    u: f64,
    v: f64,
    cells: usize,
    /// Defaults to the stability limit dx^2 / 2.
    dt: Option<f64>,
    horizon: f64,
    paths: usize,
    /// Defaults to the horizon alone.
    record_times: Vec<f64>,
    noise: bool,
    positivity: PositivityPolicy,
    initial: InitialProfile,
    observable: Observable,
    per_path: bool,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            u: 0.5,
            v: 0.5,
            cells: 64,
            dt: None,
            horizon: 1.0,
            paths: 100,
            record_times: Vec::new(),
            noise: true,
            positivity: PositivityPolicy::Exclude,
            initial: InitialProfile::Flat,
            observable: Observable::Z,
            per_path: false,
        }
    }
}

fn simulate(common: &Common, mut o: SimulateOptions) -> Result<(), CliError> {
    if o.cells < 2 {
        return Err(CliError::config("cells", "need at least two cells"));
    }
    if o.record_times.is_empty() {
        o.record_times = vec![o.horizon];
    }
    let dt = o.dt.unwrap_or_else(|| max_stable_dt(o.cells));
    o.dt = Some(dt);
    let cfg = SimConfig {
        cells: o.cells,
        dt,
        horizon: o.horizon,
        paths: o.paths,
        seed: common.seed,
        record_times: o.record_times.clone(),
        noise: o.noise,
        positivity: o.positivity,
        workers: common.workers,
    };
    cfg.validate()?;
    let params = BoundaryParams::new(o.u, o.v);
    let initial: Vec<GridField> = match o.initial {
        InitialProfile::Flat => vec![GridField::constant(o.cells, 0.0)],
        InitialProfile::Sine => vec![GridField::from_fn(o.cells, 0.0, |x| (std::f64::consts::PI * x).sin())],
        InitialProfile::Stationary => {
            let seed = openkpz::parallel::derive_seed(common.seed, 1);
            let (ens, _) = stationary_ensemble(o.u, o.v, o.cells, o.paths, seed, &default_mcmc(common))?;
            ens.fields().collect()
        }
    };
    let out = simulate_paths(|i| SheState::from_h(&initial[i % initial.len()]), &params, &cfg)?;
    let art = Artifacts::new(common, "simulate", &o)?;
    let mut table = String::from("t,x,mean,variance,n_effective\n");
    for AggregateRow { t, x, mean, variance, n_effective } in out.aggregate(o.observable) {
        table.push_str(&format!("{t:e},{x:e},{mean:e},{variance:e},{n_effective}\n"));
    }
    art.csv("simulate.csv", &table)?;
    if o.per_path {
        let ensembles: Vec<SampleEnsemble> = (0..out.times.len())
            .map(|k| relabel(out.ensemble(k, "she"), &art.config))
            .collect();
        art.write("simulate-paths.csv", &write_snapshot(&ensembles)?)?;
    }
    println!("positivity exclusion rate {}", out.exclusion_rate());
    art.json(
        "simulate.json",
        serde_json::json!({
            "steps": out.steps,
            "dt": out.dt,
            "times": out.times,
            "exclusion_rate": out.exclusion_rate(),
            "positivity_losses": out.losses,
        }),
    )?;
    Ok(())
}

fn relabel(mut e: SampleEnsemble, config: &serde_json::Value) -> SampleEnsemble {
    e.header.parameters = config.clone();
    e
}

fn default_mcmc(common: &Common) -> McmcConfig {
    McmcConfig {
        workers: common.workers,
        ..McmcConfig::new(0.6, 2000, 25, 2001, common.seed)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct StationaryOptions {
    u: f64,
    v: f64,
    cells: usize,
    samples: usize,
    rho: f64,
    burn_in: usize,
    thin: usize,
    chains: usize,
    zero_exponents: bool,
    allow_outside_regime: bool,
    normalization_samples: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            u: 1.0,
            v: 1.0,
            cells: 64,
            samples: 1000,
            rho: 0.6,
            burn_in: 2000,
            thin: 10,
            chains: 1,
            zero_exponents: false,
            allow_outside_regime: false,
            normalization_samples: 10_000,
        }
    }
}

fn sample_stationary(common: &Common, o: StationaryOptions) -> Result<(), CliError> {
    if o.cells < 2 {
        return Err(CliError::config("cells", "need at least two cells"));
    }
    if o.samples == 0 {
        return Err(CliError::config("samples", "need at least one sample"));
    }
    let art = Artifacts::new(common, "sample-stationary", &o)?;
    let mut sidecar = serde_json::Map::new();
    let ensemble = if o.u + o.v == 0.0 && !o.zero_exponents {
        sidecar.insert("sampler".into(), "bm-drift".into());
        openkpz::stationary::bm_drift_ensemble(o.u, o.cells, o.samples, common.seed)
    } else {
        if o.chains == 0 {
            return Err(CliError::config("chains", "need at least one chain"));
        }
        let per_chain = o.samples.div_ceil(o.chains);
        let cfg = McmcConfig {
            rho: o.rho,
            burn_in: o.burn_in,
            thin: o.thin,
            length: o.burn_in + per_chain * o.thin,
            seed: common.seed,
            chains: o.chains,
            workers: common.workers,
            zero_exponents: o.zero_exponents,
            allow_outside_regime: o.allow_outside_regime,
        };
        let run = openkpz::stationary::sample_stationary_mcmc(o.u, o.v, &cfg, o.cells)?;
        if let Some(w) = &run.warning {
            eprintln!("warning: {w}");
        }
        sidecar.insert("sampler".into(), "pcn".into());
        sidecar.insert("acceptance_rate".into(), run.acceptance_rate.into());
        sidecar.insert("autocorrelation_time".into(), run.autocorrelation_time.into());
        sidecar.insert("warning".into(), to_value(&run.warning));
        let z = estimate_normalization(
            o.u,
            o.v,
            o.normalization_samples,
            openkpz::parallel::derive_seed(common.seed, 4),
            o.cells,
            NormalizationOptions {
                zero_exponents: o.zero_exponents,
                allow_outside_regime: o.allow_outside_regime,
            },
        )?;
        sidecar.insert("normalization".into(), to_value(&z));
        let mut e = run.ensemble;
        e.samples.truncate(o.samples);
        e
    };
    let ensemble = relabel(
        SampleEnsemble {
            header: EnsembleHeader {
                seed: common.seed,
                ..ensemble.header
            },
            ..ensemble
        },
        &art.config,
    );
    art.write("stationary.csv", &write_snapshot(&[ensemble])?)?;
    art.json("stationary.json", serde_json::Value::Object(sidecar))?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct StationarityOptions {
    u: f64,
    v: f64,
    cells: usize,
    horizon: f64,
    paths: usize,
    initial: InitialLaw,
    alpha: f64,
    rho: f64,
    burn_in: usize,
    thin: usize,
}

impl Default for StationarityOptions {
    fn default() -> Self {
        StationarityOptions {
            u: 0.5,
            v: -0.5,
            cells: 64,
            horizon: 1.0,
            paths: 1000,
            initial: InitialLaw::Stationary,
            alpha: 0.01,
            rho: 0.6,
            burn_in: 2000,
            thin: 25,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ErgodicOptions {
    u: f64,
    v: f64,
    functional: FunctionalName,
    constant: f64,
    cells: usize,
    horizon: f64,
    batches: usize,
    reference_samples: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionalName {
    EndPoint,
    Max,
    Integral,
    Constant,
}

impl Default for ErgodicOptions {
    fn default() -> Self {
        ErgodicOptions {
            u: 0.5,
            v: -0.5,
            functional: FunctionalName::EndPoint,
            constant: 0.0,
            cells: 64,
            horizon: 50.0,
            batches: 20,
            reference_samples: 10_000,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CouplingOptions {
    u: f64,
    v: f64,
    first: InitialProfile,
    second: InitialProfile,
    /// Added to the second initial state.
    shift: f64,
    cells: usize,
    horizon: f64,
    repeats: usize,
    curve_points: usize,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        CouplingOptions {
            u: 0.5,
            v: -0.5,
            first: InitialProfile::Flat,
            second: InitialProfile::Sine,
            shift: 0.0,
            cells: 64,
            horizon: 1.0,
            repeats: 100,
            curve_points: 50,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CrossOptions {
    u: f64,
    v: f64,
    cells: usize,
    rho: f64,
    burn_in: usize,
    thin: usize,
    length: usize,
    chains: usize,
    importance_samples: usize,
    spde_paths: usize,
    spde_horizon: f64,
    batches: usize,
    points: Vec<f64>,
}

impl Default for CrossOptions {
    fn default() -> Self {
        let c = CrossSamplerConfig::new(64, 0);
        CrossOptions {
            u: 1.0,
            v: 1.0,
            cells: c.cells,
            rho: c.mcmc.rho,
            burn_in: c.mcmc.burn_in,
            thin: c.mcmc.thin,
            length: c.mcmc.length,
            chains: c.mcmc.chains,
            importance_samples: c.importance_samples,
            spde_paths: c.spde_paths,
            spde_horizon: c.spde_horizon,
            batches: c.batches,
            points: c.points,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MeanFieldOptions {
    u: f64,
    v: f64,
    cells: usize,
    paths: usize,
    times: Vec<f64>,
    points: Vec<f64>,
    /// `Z0 = 1 + amplitude cos(pi x)`.
    amplitude: f64,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        MeanFieldOptions {
            u: 0.0,
            v: 0.0,
            cells: 64,
            paths: 2000,
            times: vec![0.1, 0.5, 1.0],
            points: vec![0.0, 0.5, 1.0],
            amplitude: 0.5,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PcnOptions {
    cells: usize,
    rho: f64,
    burn_in: usize,
    thin: usize,
    length: usize,
    batches: usize,
}

impl Default for PcnOptions {
    fn default() -> Self {
        PcnOptions {
            cells: 64,
            rho: 0.5,
            burn_in: 1000,
            thin: 5,
            length: 101_000,
            batches: 20,
        }
    }
}

fn profile(p: InitialProfile, cells: usize, shift: f64) -> Result<GridField, CliError> {
    let f = match p {
        InitialProfile::Flat => GridField::constant(cells, shift),
        InitialProfile::Sine => GridField::from_fn(cells, 0.0, |x| (std::f64::consts::PI * x).sin() + shift),
        InitialProfile::Stationary => {
            return Err(CliError::config("first, second", "coupling needs deterministic initial states"))
        }
    };
    Ok(f)
}

fn experiment(common: &Common, name: ExperimentName, section: toml::Table, cli: &Cli) -> Result<(), CliError> {
    let id = name.as_str();
    let (report, art): (TestReport, Artifacts) = match name {
        ExperimentName::Stationarity => {
            let o: StationarityOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let cfg = StationarityConfig {
                initial: o.initial,
                alpha: o.alpha,
                workers: common.workers,
                mcmc: McmcConfig {
                    workers: common.workers,
                    ..McmcConfig::new(o.rho, o.burn_in, o.thin, o.burn_in + 1, 0)
                },
                ..StationarityConfig::new(o.cells, o.horizon, o.paths, common.seed)
            };
            (stationarity_experiment(o.u, o.v, &cfg)?, Artifacts::new(common, id, &o)?)
        }
        ExperimentName::Ergodic => {
            let o: ErgodicOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let f = match o.functional {
                FunctionalName::EndPoint => Functional::EndPoint,
                FunctionalName::Max => Functional::Max,
                FunctionalName::Integral => Functional::Integral,
                FunctionalName::Constant => Functional::Constant(o.constant),
            };
            let cfg = ErgodicConfig {
                batches: o.batches,
                reference_samples: o.reference_samples,
                ..ErgodicConfig::new(o.cells, o.horizon, common.seed)
            };
            (ergodic_average(o.u, o.v, f, &cfg)?, Artifacts::new(common, id, &o)?)
        }
        ExperimentName::Coupling => {
            let o: CouplingOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let h0 = profile(o.first, o.cells, 0.0)?;
            let g0 = profile(o.second, o.cells, o.shift)?;
            let cfg = CouplingConfig {
                cells: o.cells,
                horizon: o.horizon,
                seed: common.seed,
                curve_points: o.curve_points,
            };
            let r = coupling_experiment(o.u, o.v, &h0, &g0, &cfg, o.repeats, common.workers)?;
            (r, Artifacts::new(common, id, &o)?)
        }
        ExperimentName::CrossSampler => {
            let o: CrossOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let cfg = CrossSamplerConfig {
                mcmc: McmcConfig {
                    chains: o.chains,
                    ..McmcConfig::new(o.rho, o.burn_in, o.thin, o.length, 0)
                },
                importance_samples: o.importance_samples,
                spde_paths: o.spde_paths,
                spde_horizon: o.spde_horizon,
                batches: o.batches,
                workers: common.workers,
                points: o.points.clone(),
                ..CrossSamplerConfig::new(o.cells, common.seed)
            };
            (cross_sampler_experiment(o.u, o.v, &cfg)?, Artifacts::new(common, id, &o)?)
        }
        ExperimentName::MeanField => {
            let o: MeanFieldOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let mut cfg = MeanFieldConfig::new(o.cells, o.paths, common.seed);
            cfg.sim.horizon = o.times.iter().cloned().fold(0.0, f64::max);
            cfg.sim.record_times = o.times.clone();
            cfg.sim.workers = common.workers;
            cfg.points = o.points.clone();
            let z0 = GridField::from_fn(o.cells, 0.0, |x| 1.0 + o.amplitude * (std::f64::consts::PI * x).cos());
            let r = mean_field_experiment(&BoundaryParams::new(o.u, o.v), &z0, &cfg)?;
            (r, Artifacts::new(common, id, &o)?)
        }
        ExperimentName::PcnCalibration => {
            let o: PcnOptions = resolve(section, cli.u, cli.v, &cli.set)?;
            let cfg = McmcConfig::new(o.rho, o.burn_in, o.thin, o.length, common.seed);
            (pcn_calibration(&cfg, o.cells, o.batches)?, Artifacts::new(common, id, &o)?)
        }
    };
    art.csv(&format!("{id}.csv"), &report.raw.to_csv())?;
    art.json(&format!("{id}.json"), serde_json::json!({ "report": report }))?;
    for s in &report.statistics {
        let verdict = match s.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "",
        };
        println!("{:<40} {:>14.6e} {verdict}", s.name, s.value);
    }
    match report.passed {
        Some(false) => Err(CliError::Mismatch(format!("experiment {id} failed its declared thresholds"))),
        _ => Ok(()),
    }
}
