use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of the operation (zero denominator, θ = 0, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// A continued fraction that disagrees with the expansion of its angle.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("construction truncated at depth {achieved} of {requested}: denominator exceeds 2^{limit_bits}")]
    Truncated {
        requested: usize,
        achieved: usize,
        limit_bits: u32,
    },

    #[error("no schedule: {0}")]
    EmptySchedule(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    /// An experiment level that produced no usable witness.
    #[error("level unusable: {0}")]
    Unusable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
