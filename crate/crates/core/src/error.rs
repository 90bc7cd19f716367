use thiserror::Error;

/// Errors raised anywhere in the coarse-grained master equation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("input is not Hermitian (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NonHermitianInput { residual: f64, tolerance: f64 },

    #[error("eigenvalue iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("operator basis is not closed under free evolution (residual {0:.3e})")]
    ClosureViolation(f64),

    #[error("unsupported bath kind for this operation: {0}")]
    UnsupportedKind(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("Kossakowski matrix is not positive: min eigenvalue {min:.3e}, max eigenvalue {max:.3e}")]
    PositivityViolation { min: f64, max: f64 },

    #[error("audit failure: {0}")]
    AuditFailure(String),

    #[error("composite dimension {dimension} exceeds cap {cap}")]
    DimensionCapExceeded { dimension: usize, cap: usize },

    #[error("horizon {horizon} exceeds the recurrence guard {guard}")]
    RecurrenceHorizonExceeded { horizon: f64, guard: f64 },

    #[error("ODE step failure: {0}")]
    StepFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error at `{path}`: {reason}")]
    Validation { path: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
