use thiserror::Error;

/// Errors produced by GP construction, inference and hyperparameter fitting.
#[derive(Debug, Error)]
pub enum GpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("dataset must contain at least one observation")]
    EmptyDataset,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("Cholesky factorization failed after jitter escalation up to {max_jitter:e}")]
    FactorizationFailed { max_jitter: f64 },
    #[error("all {restarts} optimizer restarts failed factorization")]
    AllRestartsFailed { restarts: usize },
    #[error("model file version {got} is not supported (expected {expected})")]
    UnsupportedVersion { expected: u32, got: u32 },
    #[error("model file malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
