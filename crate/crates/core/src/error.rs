use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the named operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("invalid distortion: {0}")]
    InvalidDistortion(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A verification run produced verdicts that contradict a known result the
    /// checks rely on. This indicates a bug, not a property of the input.
    #[error("incoherent verification result: {0}")]
    Incoherent(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
