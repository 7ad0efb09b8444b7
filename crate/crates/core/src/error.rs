use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Match-making asked a sink row for an opponent.
    #[error("slot {0} is a sink and has no opponents")]
    SinkHasNoOpponents(usize),
    #[error("an all-zero meta-strategy has no best-response objective")]
    SinkHasNoObjective,
    #[error("internal error: {0}")]
    Internal(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
