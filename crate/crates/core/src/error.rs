use thiserror::Error;

/// Errors raised across the risk engine.
#[derive(Debug, Error)]
pub enum RiskError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("phi = {phi} lies outside the strip ({nu_minus}, {nu_plus})")]
    OutsideStrip {
        phi: String,
        nu_minus: f64,
        nu_plus: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("significance level {pstar} outside achievable range [{lo}, {hi}]")]
    OutOfRange { pstar: f64, lo: f64, hi: f64 },

    #[error("bootstrap aborted: {failed} of {total} replicas failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, RiskError>;
