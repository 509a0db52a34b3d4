use thiserror::Error;

/// Construction and surgery errors for the domain types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("clause contains variable {var} more than once")]
    RepeatedVariable { var: usize },
    #[error("variable {var} out of range for {count} variables")]
    VarOutOfRange { var: usize, count: usize },
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge contains vertex {vertex} more than once")]
    RepeatedVertex { vertex: usize },
    #[error("edge {edge} has size {size}, expected 3")]
    NonUniformEdge { edge: usize, size: usize },
    #[error("variable {var} still occurs in clause {clause}")]
    DanglingVariable { var: usize, clause: usize },
}

/// Errors from the exhaustive oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{count} variables or vertices exceed the exhaustive limit {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("edge {edge} is not bichromatic under the supplied coloring")]
    InvalidColoring { edge: usize },
}

/// Generator errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generation failed for seed {seed} after {attempts} attempts: {detail}")]
    GenerationFailed {
        seed: u64,
        attempts: usize,
        detail: String,
    },
}
