use thiserror::Error;

/// Failures raised by the library. Each variant corresponds to one contract violation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("branch error: {0}")]
    Branch(String),

    #[error("generators are not orthogonal (tr(XᵀY) = {0:e})")]
    Orthogonality(f64),

    #[error("index error: {0}")]
    Index(String),

    #[error("size {size} exceeds the enumeration cap {cap}")]
    Size { size: usize, cap: usize },

    #[error("projected word count {projected} exceeds the budget {ceiling}")]
    Budget { projected: u128, ceiling: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("coefficient vector has zero norm")]
    Normalization,

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
