use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("profile `{profile}` is incompatible with cloud `{cloud}`")]
    IncompatibleGeometry { profile: &'static str, cloud: &'static str },

    #[error("coupling vector is identically zero")]
    ZeroCoupling,

    #[error("length mismatch: {left} atoms vs {right} atoms")]
    LengthMismatch { left: usize, right: usize },

    #[error("ladder index {n} exceeds cutoff {cutoff}")]
    IndexOutOfLadder { n: usize, cutoff: usize },

    #[error("cutoff {cutoff} too small: tail mass {tail:e} exceeds tolerance {tol:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64, tol: f64 },

    #[error("overlap |J| = {0} exceeds 1")]
    OverlapOutOfRange(f64),

    #[error("outside model validity: {0}")]
    OutsideValidity(String),

    #[error("measurement grid misses {missing:e} of the probability mass")]
    GridTooNarrow { missing: f64 },

    #[error("Hilbert space dimension {dim} exceeds limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("operator annihilates the state (excitation {0} not representable)")]
    NullState(usize),

    #[error("state not normalized: norm^2 = {0}")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
