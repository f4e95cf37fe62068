use thiserror::Error;

/// Errors raised by the algebra constructions and loaders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    /// A text file failed to parse.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// An enumeration would exceed the configured bound.
    #[error("capacity exceeded: {what} needs {needed} items, bound is {bound}")]
    Capacity {
        what: &'static str,
        needed: u128,
        bound: u128,
    },
    /// A hypothesis of a construction or an operation precondition fails.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
