//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions don't match, or a dimension is not a power of two.
    #[error("dimension error: {0}")]
    DimensionMismatch(String),

    /// A matrix required to be Hermitian isn't, beyond tolerance.
    #[error("matrix is not Hermitian (max |M - M†| element = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// Trace, Hermiticity or positivity check failed for a density matrix.
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    /// A qubit index is out of range or a subset is malformed.
    #[error("bad qubit index: {0}")]
    BadIndex(String),

    /// Scalar argument outside its allowed range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Measurement operators violate completeness or the unbiasedness
    /// condition.
    #[error("incomplete POVM: {0}")]
    IncompletePovm(String),

    /// A measurement branch has zero amplitude on every relevant state, so
    /// its feedback angle is undefined.
    #[error("degenerate measurement branch: {0}")]
    DegenerateBranch(String),

    /// A flat parameter vector has the wrong length.
    #[error("wrong parameter count: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
}
