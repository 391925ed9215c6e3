use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("oracle search space of {needed} candidates exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("group at {endpoint} has {image} image bars but only {available} source bars")]
    GroupSizeViolation {
        endpoint: String,
        image: usize,
        available: usize,
    },

    #[error("coordinate set is not a subset of the refinement")]
    NotASubset,

    #[error("invalid irregularity witness: {0}")]
    InvalidWitness(String),

    #[error("bar with infinite death cannot enter a distance computation")]
    InfiniteBar,

    #[error("bar endpoint {0} is not in the base set")]
    EndpointNotInL(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("shift refinement grew past {limit} points")]
    RefinementTooLarge { limit: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
