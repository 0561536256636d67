/// Errors shared by all solver modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid array size: {0}")]
    InvalidSize(String),
    #[error("position is not valid for the array size")]
    InvalidPosition,
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    #[error("sequence is not concave on its finite support")]
    NonConcaveInput,
    #[error("arithmetic overflow in 64-bit value domain")]
    ArithmeticOverflow,
    #[error("instance exceeds the configured resource budget: {0}")]
    InstanceTooLarge(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
