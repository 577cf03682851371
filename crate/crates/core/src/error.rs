use thiserror::Error;

/// Errors produced by family, matrix, lattice and search operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set has {0} elements, capacity is 64")]
    CapacityExceeded(usize),
    #[error("family must contain at least one member")]
    EmptyFamily,
    #[error("ground set is empty (every member is the empty set)")]
    EmptyGroundSet,
    #[error("duplicate member row {0:#b}")]
    DuplicateRow(u64),
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("row {row:#b} uses bits outside the {n}-element ground set")]
    RowOutOfRange { row: u64, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("lattice has {0} elements, capacity is 64")]
    LatticeTooLarge(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("brute-force cap exceeded: {0}")]
    BruteForceCap(String),
    #[error("weight vector undefined: {0}")]
    UndefinedWeight(String),
    #[error("weight vector outside the simplex: {0}")]
    OutsideSimplex(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
