//! Numerical side of the open KPZ laboratory: heat kernels, a Robin SHE
//! solver with the Hopf-Cole map, samplers for the stationary measure and
//! the statistical experiments built on them.

pub mod ensemble;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod parallel;
pub mod shesolver;
pub mod stationary;

pub use ensemble::SampleEnsemble;
pub use grid::{BoundaryParams, GridField};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("{parameter}: {message}")]
    Config { parameter: String, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("(u, v) = ({u}, {v}) is outside the proven regime u + v > 0, min(u, v) > -1")]
    Regime { u: f64, v: f64 },
    #[error("non-positive value {value} at grid index {index}")]
    NonPositive { index: usize, value: f64 },
    #[error("sum of coefficients {sum} violates the Laplace domain bound C_uv = {bound}")]
    LaplaceDomain { sum: f64, bound: f64 },
    #[error("{0}")]
    Statistics(String),
}

impl CoreError {
    pub fn config(parameter: &str, message: impl Into<String>) -> Self {
        CoreError::Config {
            parameter: parameter.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
