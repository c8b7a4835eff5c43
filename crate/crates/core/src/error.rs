use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} ({left:?} vs {right:?})")]
    Dimension {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid matrix shape: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is numerically singular (sigma_min / sigma_max = {ratio:e})")]
    Singular { ratio: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("evaluation point {point} is within {distance:e} of pole {pole}")]
    PoleProximity {
        point: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("invalid problem: {}", .0.join("; "))]
    InvalidProblem(Vec<String>),

    #[error("coefficient B{index} is not unitary (||B^H B - I||_2 = {deviation:e})")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("unknown example id {0:?}")]
    UnknownExample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message} at line {line}, column {column}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
