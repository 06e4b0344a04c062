use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("empty set")]
    EmptySet,

    #[error("cardinality {got} exceeds bound {bound}")]
    CardinalityExceeded { got: usize, bound: usize },

    #[error("total weight mismatch: {0} vs {1}")]
    WeightMismatch(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("epsilon {eps} is smaller than the grid step {step}")]
    EpsilonTooSmall { eps: f64, step: f64 },

    #[error("boundary composition is nonzero in degree {0}")]
    BoundarySquareNonzero(usize),

    #[error("malformed chain complex: {0}")]
    MalformedComplex(String),

    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("subcomplex is not closed under boundary: cell {cell} in degree {degree}")]
    NotClosed { degree: usize, cell: usize },

    #[error("chain map does not commute with boundaries in degree {0}")]
    NotAChainMap(usize),

    #[error("vector is not a cycle")]
    NotACycle,

    #[error("non-finite cost value at {0:?}")]
    NonFiniteCost(Vec<f64>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
