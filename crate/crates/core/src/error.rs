use thiserror::Error;

/// Errors raised by the workbench library.
#[derive(Debug, Error)]
pub enum MuError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not positive: {0}")]
    Positivity(String),
    #[error("dense budget exceeded: total dimension {dim} > {budget}; use the probe-based variant")]
    Budget { dim: usize, budget: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MuError>;
