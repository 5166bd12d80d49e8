use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("integer overflow during {0}")]
    Overflow(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i64, modulus: u64 },

    #[error("length {n} is below the achievable threshold {threshold} for R = {support}")]
    BelowThreshold {
        n: usize,
        threshold: usize,
        support: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown matrix name `{0}`")]
    UnknownMatrix(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
