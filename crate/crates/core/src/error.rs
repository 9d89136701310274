//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by lattice, transform, operator and identification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// The lattice generator does not have the rank required by the operation.
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    /// Two signals (or a signal and a table) that must share a length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A parameter that must divide the signal length does not.
    #[error("{param} = {value} does not divide L = {len}")]
    NotADivisor {
        param: &'static str,
        value: usize,
        len: usize,
    },

    /// Construction parameters outside their valid range.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Riesz bounds of an empty family are undefined.
    #[error("empty family")]
    EmptyFamily,

    /// Matrix/vector shapes incompatible for the requested solve.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The identification matrix has no numerically bounded left inverse.
    #[error("not identifiable: smallest/largest singular value ratio {ratio:.3e} below tolerance {tol:.3e}")]
    NotIdentifiable { ratio: f64, tol: f64 },

    /// Rounding a continuous generator onto the grid collapsed its rank.
    #[error("degenerate discretization: {0}")]
    DegenerateDiscretization(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
