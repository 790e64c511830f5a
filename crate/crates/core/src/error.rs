use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed instance text. `line` is 1-based; 0 means "end of input".
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("n must be ≥ 3 (got {0})")]
    TooSmall(usize),

    #[error("matrix length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("cost overflow while building instance")]
    CostOverflow,

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid flow state: {0}")]
    InvalidFlow(String),

    #[error("invalid walk in separated graph: {0}")]
    InvalidWalk(String),

    #[error("invalid alternating structure: {0}")]
    InvalidStructure(String),

    #[error("patch error: {0}")]
    Patch(String),

    #[error("instance size {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("no optimality gap: initial cost equals the optimum")]
    NoGap,

    #[error("invalid gap arguments: {0}")]
    InvalidGap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
