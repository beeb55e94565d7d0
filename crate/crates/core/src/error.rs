use thiserror::Error;

pub type Result<T, E = RcqError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum RcqError {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The query range holds at most one point; callers answer it directly.
    #[error("trivial range with {0} point(s)")]
    TrivialRange(usize),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate {value} does not fit in a {bits}-bit universe")]
    CoordinateOverflow { value: u64, bits: u32 },

    #[error("malformed index: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RcqError {
    pub fn budget(msg: impl Into<String>) -> Self {
        RcqError::Budget(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        RcqError::InvalidParameter(msg.into())
    }
}
