use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),
    #[error("edge {0} is a loop")]
    LoopEdge(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge set is not a cycle (vertex {0} has odd degree)")]
    NotACycle(usize),
    #[error("graph is not locally bipartite")]
    NotLocallyBipartite,
    #[error("cut does not represent the orientation character w1")]
    NotW1Representative,
    #[error("edge set is not a perfect matching: {0}")]
    NotPerfect(String),
    #[error("edge set is not a cocycle: face {0} meets it an odd number of times")]
    InvalidCocycle(usize),
    #[error("graph has an odd number of vertices ({0})")]
    OddVertexCount(usize),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    AsymmetryDetected(usize, usize),
    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("quadratic law violated: {0}")]
    LawViolation(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("unsupported lattice spec: {0}")]
    UnsupportedSpec(String),
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("cut `{0}` is not a cocycle")]
    NonCocycleCut(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}
