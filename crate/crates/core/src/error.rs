use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("insufficient collective storage: K*M = {km} < N = {n}")]
    InsufficientCollectiveStorage { km: String, n: usize },

    #[error("mode mismatch: expected {expected}, got {actual}")]
    ModeMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("file size {bits} bits is not divisible into {parts} byte-aligned pieces")]
    Divisibility { bits: u64, parts: u64 },

    #[error("cache size M = {m} is not a corner point N*t/K for integer t")]
    NotCorner { m: String },

    #[error("placement mismatch: {0}")]
    PlacementMismatch(String),

    #[error("user {user} cannot recover {piece}")]
    DecodeFailure { user: usize, piece: String },

    #[error("gap undefined: achievable rate {achievable} with zero lower bound")]
    Degenerate { achievable: String },

    #[error("coding field too small: {0}")]
    FieldTooSmall(String),

    #[error("parse error: {0}")]
    Parse(String),
}
