use thiserror::Error;

/// Errors produced by sequence construction, optimization, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence must contain at least one sample")]
    EmptySequence,

    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shift {shift} out of range for aperiodic correlation of length {len}")]
    ShiftOutOfRange { shift: i64, len: usize },

    #[error("operation undefined for an all-zero sequence")]
    ZeroSequence,

    #[error("spectrum mask blocks every subcarrier")]
    FullyBlockedMask,

    #[error("unknown built-in seed set `{0}`")]
    UnknownSeedSet(String),

    #[error("zero-correlation verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
