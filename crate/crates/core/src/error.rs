use thiserror::Error;

/// Errors raised by the combinatorial and module-theoretic operations.
///
/// Vertex indices are stored 0-based; messages print them 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid vertex {} (graph has {n} vertices)", .vertex + 1)]
    InvalidVertex { vertex: usize, n: usize },
    #[error("graph has a loop at vertex {}", .0 + 1)]
    Loop(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("word is not reduced: root at position {position} is not positive")]
    NonReducedWord { position: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("reduced-word closure exceeded the cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("weight has a negative coefficient at vertex {}", .vertex + 1)]
    NegativeWeight { vertex: usize },
    #[error("modules live over different graphs")]
    GraphMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("preprojective relation fails at vertex {}", .vertex + 1)]
    RelationFailure { vertex: usize },
    #[error("module is not nilpotent")]
    NotNilpotent,
    #[error("{op} produced a module violating the relation at vertex {}", .vertex + 1)]
    InternalRelationFailure { op: &'static str, vertex: usize },
    #[error("subspace is not closed under the arrow maps")]
    NotASubmodule,
    #[error("linear maps do not commute with the arrows")]
    NotAMorphism,
    #[error("no injective morphism found after {attempts} attempts")]
    NoEmbeddingFound { attempts: usize },
    #[error("not in a generic stratum for this word; residual dimension vector {residual:?}")]
    NotInGenericStratum { residual: Vec<usize> },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("operation needs a nonempty word")]
    EmptyWord,
    #[error("no braid move of the requested kind at position {0}")]
    InvalidMovePosition(usize),
    #[error("words represent different Weyl group elements")]
    DifferentWeylElement,
    #[error("module would exceed {cap} dimensions (is the graph of finite type?)")]
    TooLarge { cap: usize },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
