//! `openkpz`: command line front end for the open KPZ laboratory.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error in `{parameter}`: {message}")]
    Config { parameter: String, message: String },
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(parameter: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            parameter: parameter.to_string(),
            message: message.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Mismatch(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<openkpz::CoreError> for CliError {
    fn from(e: openkpz::CoreError) -> Self {
        use openkpz::CoreError as E;
        match e {
            E::Config { parameter, message } => CliError::Config { parameter, message },
            E::Regime { .. } => CliError::config("u, v", e.to_string()),
            E::LaplaceDomain { .. } => CliError::config("cs", e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "openkpz", version, about = "Open KPZ laboratory: tree algebra, heat kernels, SHE Monte Carlo, stationary samplers")]
pub struct Cli {
    /// TOML file with top-level `seed`, `workers`, `out_dir` and one table per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random stream (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Directory for artifacts (default `openkpz-out`).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Left boundary parameter.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// Right boundary parameter.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// Override a subcommand parameter, e.g. `--set paths=500` or `--set mcmc.rho=0.4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check degrees, coproducts, structure group and renormalisation tables.
    /// Writes verify-algebra.json.
    VerifyAlgebra {
        /// Alternative table file in the golden format.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Neumann heat kernel by images (and the Robin kernel when --u/--v are given).
    /// Writes kernel.csv with columns x, y, neumann, error_bound[, robin].
    Kernel,
    /// Quadrature for the boundary constant a. Writes constant-a.json.
    ConstantA,
    /// Monte Carlo for the SHE. Writes simulate.csv with columns t, x, mean,
    /// variance, n_effective, simulate.json, and with per_path = true
    /// simulate-paths.csv (header line, then time, path, h0..hN).
    Simulate,
    /// Stationary samples. Writes stationary.csv (header line, then time,
    /// path, h0..hN) and stationary.json with acceptance rate,
    /// autocorrelation time and normalization estimate.
    SampleStationary,
    /// Statistical experiment. Writes <name>.json and <name>.csv with the raw
    /// statistics (columns listed in the report notes).
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Stationarity,
    Ergodic,
    Coupling,
    CrossSampler,
    MeanField,
    PcnCalibration,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Stationarity => "stationarity",
            ExperimentName::Ergodic => "ergodic",
            ExperimentName::Coupling => "coupling",
            ExperimentName::CrossSampler => "cross-sampler",
            ExperimentName::MeanField => "mean-field",
            ExperimentName::PcnCalibration => "pcn-calibration",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("openkpz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
