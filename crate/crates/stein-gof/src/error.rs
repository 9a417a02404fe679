use thiserror::Error;

/// Errors produced by parsing, validation and the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no observations found")]
    EmptyInput,

    #[error("cannot parse token {position}: {token:?}")]
    Parse { position: usize, token: String },

    #[error("sample too small: need at least {required} observations, got {actual}")]
    SampleTooSmall { required: usize, actual: usize },

    #[error("degenerate sample: zero variance")]
    DegenerateSample,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected length {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("infeasible constraint: zero is outside the convex hull of the pseudo-values")]
    InfeasibleConstraint,

    #[error("root finder did not converge; last residual {residual:e}")]
    ConvergenceFailure { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
