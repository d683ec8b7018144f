use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument lies outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A dyadic index outside the range the grid can resolve.
    #[error("dyadic index {q} outside resolvable range [{min}, {max}]")]
    Range { q: i32, min: i32, max: i32 },

    /// The domain cannot host the requested structure.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Homogeneous analysis was handed a function with a nonzero mean.
    #[error("input has mean {mean:e}; homogeneous norms require a mean-zero function")]
    NotMeanZero { mean: f64 },

    /// Two grid functions that must share a grid do not.
    #[error("grid mismatch: {0}")]
    DomainMismatch(String),

    /// A block the caller asked to fit is identically zero.
    #[error("dyadic block {q} is zero")]
    ZeroBlock { q: i32 },

    /// Not enough samples (snapshots, diagnostic rows, times) to proceed.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Non-finite values appeared in a sampled field.
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
