use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cone is missing its {0} representation")]
    MissingRepresentation(&'static str),

    #[error("inconsistent cone representations: {0}")]
    InconsistentCone(String),

    #[error("dual generators are linearly dependent (rank {rank} < {count})")]
    DualNotLI { rank: usize, count: usize },

    #[error("desk scale exceeded: {what} is {actual}, limit {limit}")]
    DeskScaleExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("supremum does not exist at node {node}{context}")]
    SupNotExists { node: String, context: String },

    #[error("unsupported cone: {0}")]
    UnsupportedCone(String),

    #[error("empty collection: {0}")]
    Empty(&'static str),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("time {time} out of range 0..={horizon}")]
    TimeOutOfRange { time: usize, horizon: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("unknown supremum method `{0}`")]
    UnknownMethod(String),
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
