use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("series has (near) zero variance")]
    DegenerateSeries,

    #[error("series of length {len} is too short (need at least {required})")]
    SeriesTooShort { len: usize, required: usize },

    #[error("lag {lag} outside the admissible range 2..={max}")]
    LagOutOfRange { lag: usize, max: usize },

    #[error("design matrix is numerically singular even at degree 0")]
    RankDeficient,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
