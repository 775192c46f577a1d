use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("matrix is not skew-symmetrizable: {0}")]
    NotSymmetrizable(String),

    #[error("vector {0} is not sign-coherent")]
    NotSignCoherent(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("rank {rank} exceeds the limit {limit} for this operation")]
    RankTooLarge { rank: usize, limit: usize },

    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(usize),

    #[error("word length {len} exceeds the cap {cap}")]
    WordBudgetExceeded { len: usize, cap: usize },

    #[error("algebra element with {terms} terms exceeds the cap {cap}")]
    TermBudgetExceeded { terms: usize, cap: usize },

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
