use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("mode sizes differ: {left:?} vs {right:?}")]
    ModeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("dense size {entries} exceeds the limit of {limit} entries")]
    TooLarge { entries: u128, limit: u128 },
    #[error("dense linear algebra failed: {0}")]
    Linalg(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("breakdown: {0}")]
    Breakdown(String),
    #[error("quantity undefined: {0}")]
    Undefined(String),
}
