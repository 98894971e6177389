use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cost profile: {0}")]
    InvalidProfile(String),
    #[error("invalid game: {0}")]
    InvalidSpec(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("strategy does not belong to the {side} family: {detail}")]
    FamilyMismatch { side: &'static str, detail: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no closed form for this variant ({0}); use the numeric oracle")]
    NoClosedForm(String),
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
