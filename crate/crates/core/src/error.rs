use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An iterative method failed or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Spectral analysis could not produce the requested object.
    #[error("analysis error: {0}")]
    Analysis(String),

    /// A dense fallback would exceed the configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
