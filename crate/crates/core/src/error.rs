use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("window must be nonzero")]
    ZeroWindow,

    #[error("lattice step {step} does not divide L = {len}")]
    Divisibility { step: usize, len: usize },

    #[error("not a frame: smallest eigenvalue {min_eig:e} <= threshold {threshold:e}")]
    NotAFrame { min_eig: f64, threshold: f64 },

    #[error("operator is not Hermitian (asymmetry {asymmetry:e})")]
    NonHermitian { asymmetry: f64 },

    #[error("operation requires odd L (got L = {0})")]
    EvenLength(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("exponent constraint violated: {0}")]
    ExponentConstraint(String),

    #[error("eigensolver did not converge (matrix hash {hash:016x})")]
    SolverFailure { hash: u64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
