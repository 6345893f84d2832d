use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input text, word or file could not be parsed or references unknown names.
    #[error("malformed input: {0}")]
    Malformed(String),
    /// An operation was called on an input that violates its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A configured size or budget cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// The input is well formed but outside what the construction supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A numerical or structural check failed on the result of an analysis.
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_) | Error::Json(_) => 2,
            Error::Precondition(_) | Error::Unsupported(_) => 3,
            Error::Resource(_) => 4,
            Error::Analysis(_) | Error::Io(_) => 5,
        }
    }
}
