use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("value {value} in dimension {dim} lies outside [{low}, {high}]")]
    OutOfBounds {
        dim: usize,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("action space has {cardinality} actions, limit is {limit}")]
    CardinalityExceeded { cardinality: f64, limit: usize },
    #[error("empty action set")]
    EmptyActionSet,
    #[error("need at least two distinct candidates with Q-values")]
    TooFewCandidates,
    #[error("empty catalog")]
    EmptyCatalog,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("malformed action: {0}")]
    MalformedAction(String),
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("episode {episode}: {source}")]
    Episode {
        episode: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }
}
