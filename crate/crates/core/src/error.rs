use thiserror::Error;

/// Errors produced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions or orders that do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// An index set that is not a subset of `{1, .., d}`.
    #[error("index error: {0}")]
    Index(String),
    /// A value outside the accepted domain of an argument.
    #[error("argument error: {0}")]
    Argument(String),
    /// Malformed user input (files, partition strings).
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
