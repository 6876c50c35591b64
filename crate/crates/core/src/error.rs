use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("size cap exceeded: side {side} > {cap}")]
    SizeCap { side: usize, cap: usize },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("search budget exhausted during {stage}")]
    Budget { stage: String },

    #[error("graph has loops; chromatic number is undefined")]
    LoopsPresent,

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
