use serde::{Deserialize, Serialize};

use crate::exact::lp::LpError;

/// A concrete counterexample attached to a failed check: the level and the
/// vector (rendered as rational strings) at which the failure occurs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    pub vector: Vec<String>,
    pub reason: String,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at level {} on ({})", self.reason, self.level, self.vector.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polyhedron is unbounded")]
    UnboundedPolyhedron,
    #[error("polytope has neither representation")]
    EmptyRepresentation,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("level {level} out of range for length {length}")]
    BadLevel { level: usize, length: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("truncation length {k} out of range 1..={length}")]
    BadLength { k: usize, length: usize },
    #[error("space is flagged graded but level {0} is not dominated by level {1}")]
    NotGraded(usize, usize),
    #[error("space must have at least one seminorm")]
    EmptySequence,
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not a multi-{delta}-isometric embedding: {witness}")]
    NotAnEmbedding { delta: String, witness: Witness },
    #[error("map does not preserve the first {n} seminorms: {witness}")]
    NotAnNEmbedding { n: usize, witness: Witness },
    #[error("epsilon must be strictly positive")]
    EpsNonPositive,
    #[error("delta must be nonnegative")]
    NegativeDelta,
    #[error("space is not separated")]
    NotSeparated,
    #[error("catalog member {0} is not separated")]
    CatalogNotSeparated(usize),
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("pair was not discharged when the tower was built")]
    PairNotInCertificates,
    #[error("towers are incompatible: {0}")]
    TowersIncompatible(String),
    #[error("embedding set is empty")]
    EmptyEmbeddingSet,
    #[error("embedding set is unbounded; no finite net exists")]
    UnboundedEmbeddingSet,
    #[error("colouring is undefined at the given point")]
    UndefinedPoint,
    #[error("only single-seminorm inputs are supported")]
    MultiLevelInput,
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
