use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("family construction failed: {0}")]
    Construction(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("element set is not downward closed: missing parent {0}")]
    NotDownwardClosed(String),
    #[error("sampler failed: {0}")]
    Sampler(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unknown test function `{0}`")]
    UnknownFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
