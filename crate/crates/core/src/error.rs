use thiserror::Error;

/// Errors for matrix validation, scalar-function domains, and input parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("trace must be {expected} (got {got})")]
    BadTrace { expected: f64, got: f64 },

    #[error("matrix is not strictly positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailed,

    #[error("function '{name}' undefined at x = {x:.6e} (got {value})")]
    Domain { name: String, x: f64, value: f64 },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter {
        name: &'static str,
        message: String,
    },

    #[error("invalid probability vector: {0}")]
    BadSimplex(String),

    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("invalid stochastic matrix: {0}")]
    BadStochastic(String),

    #[error("unknown spec '{0}'")]
    UnknownSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
