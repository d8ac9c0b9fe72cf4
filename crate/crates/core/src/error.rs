use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("an instance needs at least two arms, got {0}")]
    EmptyInstance(usize),
    #[error("arm {index}: {reason}")]
    InvalidArm { index: usize, reason: String },
    #[error("arm index {index} out of range for {len} arms")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("outcome tree exceeds the budget of {budget} leaves")]
    TooLarge { budget: usize },
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
