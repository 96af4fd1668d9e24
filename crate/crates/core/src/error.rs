use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Unknown labels, malformed arguments, violated preconditions.
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("out of range: {0}")]
    Range(String),
    /// A recorded artifact contradicts itself (for instance a tried bad move
    /// that the world says was correct).
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity { what: String, needed: u128, limit: u128 },
    #[error("missing oracle: {0}")]
    MissingOracle(String),
    #[error("oracle error: {0}")]
    Oracle(String),
    #[error("generation failed: {0}")]
    Generation(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
