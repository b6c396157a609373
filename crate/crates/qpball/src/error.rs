use thiserror::Error;

/// Errors shared by the library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("asymmetry {max_asym:.3e} exceeds tolerance {tol:.3e}")]
    Asymmetric { max_asym: f64, tol: f64 },

    #[error("eigendecomposition did not converge after {sweeps} sweeps")]
    EigNoConvergence { sweeps: usize },

    #[error("point is not on the standard simplex: {0}")]
    SimplexViolation(String),

    #[error("expected an even-dimensional block matrix, got dimension {0}")]
    OddDimension(usize),

    #[error("exact enumeration limited to dimension {max}, got {got}")]
    TooLargeForExact { got: usize, max: usize },

    #[error("exponent p = {0} outside [1, 2]")]
    ExponentOutOfRange(f64),

    #[error("fast path requires c = 0 and no positive entry in the matrix")]
    NotSignConstrained,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
