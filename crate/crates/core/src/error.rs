use thiserror::Error;

/// Errors raised by the certification toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gram matrix of the pruned columns is singular")]
    SingularGram,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("exact elimination exceeded the bit-length cap of {0} bits")]
    BitLengthExceeded(u64),
    #[error("matrix is not invertible")]
    Singular,
    #[error("tolerances must be strictly positive")]
    InvalidTolerance,
    #[error("a frame needs at least one vector")]
    EmptyFrame,
    #[error("a subspace family needs at least one member")]
    EmptyFamily,
    #[error("vectors do not span the ambient space")]
    NotAFrame,
    #[error("frame is not Parseval (max |S - I| = {0:e})")]
    NotParseval(f64),
    #[error("enumeration over {m} vectors exceeds the guard of {max}")]
    TooLarge { m: usize, max: usize },
    #[error("need at least {needed} vectors, got {got}")]
    TooFewVectors { needed: usize, got: usize },
    #[error("unsupported field {0:?}; only real exact or float inputs are accepted")]
    UnsupportedField(String),
    #[error("complement has dimension zero (M = N)")]
    NoComplement,
    #[error("partition is not a complement-property violation")]
    NotAViolation,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("projection target is the zero subspace")]
    NotAProjectionTarget,
    #[error("zero subspace is not an admissible family member")]
    ZeroSubspace,
    #[error("direction vector is zero")]
    ZeroVector,
    #[error("parameter out of range: {0}")]
    RangeError(String),
    #[error("resampling gave up after {0} attempts")]
    ResampleExhausted(usize),
    #[error("coefficients do not reproduce the identity (residual {0:e})")]
    BadCoefficients(f64),
    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error("input format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
