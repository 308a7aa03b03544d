use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feedback taps {taps:?} are not primitive for degree {degree}: period {period}, expected {expected}")]
    NonPrimitiveTaps {
        degree: u32,
        taps: Vec<u32>,
        period: usize,
        expected: usize,
    },

    #[error("LFSR initial state must be nonzero")]
    ZeroState,

    #[error("not a permutation of 1..={order}: {detail}")]
    NotPermutation { order: usize, detail: String },

    #[error("no Costas permutation of order {order} found")]
    CostasSearchExhausted { order: usize },

    #[error("{what} must be a whole number of samples, got {value}")]
    NonIntegerSamples { what: &'static str, value: f64 },

    #[error("factor {factor} does not divide sample count {len}")]
    NotADivisor { factor: usize, len: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    SampleRateMismatch { left: f64, right: f64 },

    #[error("spectrum never drops below {level_db} dB: bandwidth exceeds the Nyquist span")]
    ExceedsNyquist { level_db: f64 },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
