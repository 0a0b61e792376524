use thiserror::Error;

/// Errors raised by space construction, cover algebra and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for a space of {len} points")]
    Index { index: usize, len: usize },

    #[error("window contains no points: {0}")]
    EmptySpace(String),

    #[error("size cap exceeded: {what} would have {size} elements (cap {cap})")]
    SizeCap { what: String, size: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {message}")]
    Precondition { message: String, witness: Vec<usize> },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("point {point} is not assigned to any tile")]
    Assignment { point: usize },

    #[error("map undefined on source point {0}")]
    Domain(usize),

    #[error("projection of point {point} falls outside factor window {factor}")]
    Window { point: usize, factor: usize },

    #[error("insufficient data: {0}")]
    Data(String),

    #[error("all radii truncated: {0}")]
    Truncation(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(message: impl Into<String>, witness: Vec<usize>) -> Self {
        Error::Precondition {
            message: message.into(),
            witness,
        }
    }
}
