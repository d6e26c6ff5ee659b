use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Every variant maps onto one of the command-line exit codes, see
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("not a regular sequence (no morphism over the algebraic closure): {0}")]
    NotRegular(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("size budget exceeded: {0}")]
    Budget(String),

    #[error("indeterminate resultant: {0}")]
    Indeterminate(String),

    #[error("unsupported root geometry at p = {prime}: {detail}")]
    UnsupportedRootGeometry { prime: u64, detail: String },

    #[error("numeric failure: {message} (achieved residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("precondition refused: {0}")]
    Refused(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::DegreeMismatch(_)
            | Error::NotRegular(_)
            | Error::Refused(_)
            | Error::Io(_) => 2,
            Error::Capability(_)
            | Error::Budget(_)
            | Error::Indeterminate(_)
            | Error::UnsupportedRootGeometry { .. } => 3,
            Error::Numeric { .. } => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
