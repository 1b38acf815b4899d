use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{name}` at line {line}, column {col}")]
    UnknownGenerator { name: String, line: usize, col: usize },
    #[error("coset enumeration exceeded {0} cosets")]
    CapacityExceeded(usize),
    #[error("permutation action is not faithful")]
    NotFaithful,
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group order {order} exceeds the bound {bound} for {what}")]
    BoundExceeded { what: &'static str, order: u64, bound: u64 },
    #[error("{p} does not divide the group order {order}")]
    PrimeDoesNotDivide { p: u64, order: u64 },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("order collapsed: expected {expected}, realized {realized}")]
    OrderCollapse { expected: u64, realized: u64 },
    #[error("relator `{0}` not found in base presentation")]
    RelatorNotFound(String),
    #[error("matrix error: {0}")]
    Matrix(String),
    #[error("invalid construction: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;
