use thiserror::Error;

use crate::structure::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("budget must be positive for a nonempty source set and m > 0")]
    BudgetZero,
    #[error("structure has no column (in-edge) access")]
    NoColumnAccess,
    #[error("row {0} is infinite and carries no tail bound")]
    NoTailBound(VertexId),
    #[error("row {0} is infinite; a cutoff is required")]
    CutoffRequired(VertexId),
    #[error("cutoff {cutoff} is below the support of the other factor (max vertex {vertex})")]
    CutoffTooSmall { cutoff: u64, vertex: VertexId },
    #[error("power touched the infinite row {0}")]
    InfiniteRowReached(VertexId),
    #[error("operation requires a finite universe")]
    UniverseNotFinite,
    #[error("oracle scale exceeded: dimension {dim} > {max}")]
    OracleScale { dim: u64, max: u64 },
    #[error("no depth oracle for this family")]
    OracleUnavailable,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}
