use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {vertex}: colour {colour} out of range 1..={n}")]
    ColourOutOfRange { vertex: usize, colour: u64, n: usize },
    #[error("vertex {vertex}: colour {colour} listed twice")]
    RepeatedColour { vertex: usize, colour: u32 },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("invalid tree-partition: {0}")]
    Partition(String),
    #[error("invalid path decomposition: {0}")]
    Decomposition(String),
    #[error("invalid multicoloured clique instance: {0}")]
    Clique(String),
    #[error("too large for oracle: list product {product} exceeds budget {budget}")]
    OracleBudget { product: u128, budget: u128 },
    #[error("refused: {0}")]
    Refused(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
