use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("dimB ({dim_b}) * dimC ({dim_c}) does not equal matrix side {n}")]
    DimensionMismatch { dim_b: usize, dim_c: usize, n: usize },

    #[error("index {index} out of range for side {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("swap indices must differ (got {0} twice)")]
    DegenerateSwap(usize),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix side {n} exceeds the brute-force guard of {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("could not sample a nonzero factor after {0} attempts")]
    DegenerateDensity(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
