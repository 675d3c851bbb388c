use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |M - M†| = {defect:e} at entry ({row}, {col})")]
    NotHermitian { defect: f64, row: usize, col: usize },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square with at least one row, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("state norm {norm} deviates from 1")]
    NotNormalized { norm: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("expectation value has imaginary part {0:e}")]
    ComplexExpectation(f64),
    #[error("variance {0:e} is negative beyond tolerance")]
    NegativeVariance(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("beta must lie in (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("hbar must be positive, got {0}")]
    InvalidHbar(f64),
    #[error("invalid search parameters: {0}")]
    InvalidSearch(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("2j must be a nonnegative integer, got j = {0}")]
    InvalidSpin(f64),
    #[error("prepared state is not an eigenstate (residual {residual:e})")]
    NotEigenstate { residual: f64 },
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
