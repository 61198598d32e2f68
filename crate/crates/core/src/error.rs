use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid letter {letter:?} at offset {offset} for rank {rank}")]
    BadLetter {
        letter: char,
        offset: usize,
        rank: usize,
    },
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("letter cap exceeded: {len} > {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("letter cap exceeded during iteration after {completed} completed steps ({len} > {cap})")]
    IterationCap {
        completed: usize,
        len: usize,
        cap: usize,
    },
    #[error("not an inverse pair: {side} fails on generator {generator}")]
    NotInverse { generator: String, side: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for the resource-cap variants.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::IterationCap { .. })
    }
}
