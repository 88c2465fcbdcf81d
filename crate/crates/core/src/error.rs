use thiserror::Error;

/// Errors raised by the library. Every variant names what went wrong in
/// a form suitable for a one-line diagnostic.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZenError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure is not doubling: {0}")]
    NonDoubling(String),

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("grid is not commensurate with mu = {mu}: {reason}")]
    IncommensurateGrid { mu: f64, reason: String },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("unknown weight `{0}`")]
    UnknownWeight(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl ZenError {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        ZenError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by an iteration or extrapolation that failed
    /// to settle, as opposed to invalid input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, ZenError::NonConvergence(_))
    }
}

pub type Result<T> = std::result::Result<T, ZenError>;
