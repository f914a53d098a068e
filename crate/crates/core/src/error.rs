use thiserror::Error;

/// Failures surfaced by the library. `path` names the offending input field
/// in JSON-pointer-like notation (`charts[0].boundary[2].coefficient`).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("weight is unbounded below along ray {ray}")]
    Unbounded { ray: String },
    #[error("undefined value: {0}")]
    Undefined(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { path: path.into(), message: message.into() }
}
