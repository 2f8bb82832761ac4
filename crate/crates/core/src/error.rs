use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frame {frame} is not defined for the {scheme} scheme")]
    IncompatibleFrame { scheme: String, frame: String },

    #[error("non-finite state encountered; last valid time t = {last_valid_time}")]
    NonFiniteState { last_valid_time: f64 },

    #[error("step-size violation at t = {time}: {reason}")]
    GuardViolation { time: f64, reason: String },

    #[error("quadrature for {label} did not converge: Richardson disagreement {disagreement:e}")]
    QuadratureNonConvergence { label: String, disagreement: f64 },

    #[error("vector field returned a non-finite value at {point:?}")]
    NonFiniteField { point: Vec<f64> },

    #[error("cannot classify the omega-limit: {reason}")]
    Unclassifiable { reason: String },

    #[error("averaging invalid: coefficient {label} diverges (exponent {exponent:.3}) with a non-vanishing bracket")]
    DivergentTerm { label: String, exponent: f64 },

    #[error("point is not an equilibrium: |f(x_eq)| = {residual:e}")]
    NotEquilibrium { residual: f64 },

    #[error("eigenvalue check failed: {0}")]
    Eigen(String),

    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
