use thiserror::Error;

/// Errors raised by geometric and linear-algebra operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("vector norm {0:e} is too small to define a ray")]
    ZeroVector(f64),

    #[error("outside chart domain: rays are antipodal")]
    OutsideChart,

    #[error("cut locus: minimal geodesic not unique")]
    CutLocus,

    #[error("tangent vectors are based at different rays")]
    BaseMismatch,

    #[error("rays are not antipodal (overlap {0:e})")]
    NotAntipodal(f64),

    #[error("superposition coefficient is zero")]
    ZeroCoefficient,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("zero dispersion: no partner needed")]
    ZeroDispersion,

    #[error("outside regularity domain")]
    OutsideRegularityDomain,

    #[error("empty submanifold")]
    EmptySubmanifold,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),

    #[error("{0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
