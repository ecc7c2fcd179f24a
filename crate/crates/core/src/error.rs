use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolabError {
    #[error("invalid profile at index {index}: {reason}")]
    InvalidProfile { index: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("error model rejected at z = {z}: {reason}")]
    ModelRejected { z: f64, reason: String },

    #[error("step direction error: ds = {0} must be negative")]
    StepDirection(f64),

    #[error("step size |ds| = {ds} exceeds the stability bound {bound}")]
    StepTooLarge { ds: f64, bound: f64 },

    #[error("singularity: F reached zero at interior z = {z} (s = {s})")]
    Singularity { z: f64, s: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("barrier construction failed: {0}")]
    BarrierConstruction(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("integrator drift: {0}")]
    Drift(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SolabError {
    fn from(e: std::io::Error) -> Self {
        SolabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SolabError>;
