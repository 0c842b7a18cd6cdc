//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid label `{0}`: labels must be non-empty and free of whitespace and `,;|(){{}}[]*=:`")]
    InvalidLabel(String),
    #[error("duplicate flag label `{0}`")]
    DuplicateFlag(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("aggregate mixes genus-marked and unmarked corollas")]
    MixedGenusMarking,
    #[error("flag map has wrong length: expected {expected}, got {got}")]
    FlagMapLength { expected: usize, got: usize },
    #[error("vertex map has wrong length: expected {expected}, got {got}")]
    VertexMapLength { expected: usize, got: usize },
    #[error("flag index {0} out of range")]
    FlagIndex(usize),
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("flag map is not injective (source flag {0} hit twice)")]
    NotInjective(usize),
    #[error("vertex map is not surjective (target vertex {0} has empty fiber)")]
    NotSurjective(usize),
    #[error("ghost involution touches flag {0} which is in the image of the flag map")]
    GhostHitsExternal(usize),
    #[error("flag {0} is neither external nor paired by the ghost involution")]
    UncoveredFlag(usize),
    #[error("ghost pair ({0}, {1}) is degenerate or duplicated")]
    BadGhostPair(usize, usize),
    #[error("target flag {flag} maps outside the fiber of its vertex")]
    FiberViolation { flag: usize },
    #[error("ghost edge ({0}, {1}) joins vertices in different fibers")]
    GhostAcrossFibers(usize, usize),
    #[error("genus mismatch at target vertex {vertex}: expected {expected}, got {got}")]
    GenusMismatch {
        vertex: usize,
        expected: i64,
        got: i64,
    },
    #[error("genus mark missing on a corolla in a genus-marked context")]
    GenusMissing,
    #[error("composition mismatch: target of inner morphism differs from source of outer morphism")]
    CompositionMismatch,
    #[error("flag or vertex labels collide; relabel one operand before tensoring")]
    RelabelRequired,
    #[error("morphism is not an isomorphism")]
    NotIso,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("unknown built-in op `{0}`")]
    UnknownOp(String),
    #[error("GenusN requires an explicit cap")]
    MissingCap,
    #[error("decoration `{0}` is not in the domain set")]
    NotInDomain(String),
    #[error("decoration tuple has wrong length: expected {expected}, got {got}")]
    TupleLength { expected: usize, got: usize },
    #[error("op `{op}` does not act on this morphism: {reason}")]
    OutsideHome { op: String, reason: String },
    #[error("marks required for op `{0}` but none supplied")]
    MarksRequired(String),
    #[error("invalid op table: {0}")]
    BadTable(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CatError {
    #[error("unknown built-in category `{0}`")]
    UnknownCategory(String),
    #[error("object is missing flag marks required by category `{0}`")]
    MarksRequired(String),
    #[error("object carries marks but category `{0}` has no flag rule")]
    UnexpectedMarks(String),
    #[error("mark value {0} out of range for the category's flag rule")]
    MarkRange(u8),
    #[error("decoration layer missing on object of a decorated category")]
    DecorationRequired,
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("op error: {0}")]
    Op(#[from] OpError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KanError {
    #[error("colimit at {0} did not stabilize at bound {1}; raise the bound")]
    Unstable(String, usize),
    #[error("object of size {got} exceeds enumeration bound {bound}")]
    BoundTooSmall { bound: usize, got: usize },
    #[error("element `{0}` is not a known colimit class representative")]
    UnknownClass(String),
    #[error("category error: {0}")]
    Cat(#[from] CatError),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("op error: {0}")]
    Op(#[from] OpError),
}
