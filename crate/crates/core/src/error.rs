use thiserror::Error;

use crate::graph::ValidationFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("truncation specs of the operands differ")]
    SpecMismatch,

    #[error("coefficient not computed at this truncation: {0}")]
    OutsideTruncation(String),

    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("series must involve a single nonnegative-exponent variable")]
    NotUnivariate,

    #[error("edge q_{} is a loop", .0 + 1)]
    LoopEdge(usize),

    #[error("edge q_{} is not a loop", .0 + 1)]
    NonLoopEdge(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph does not match psi data: {0}")]
    Validation(ValidationFailure),

    #[error("invalid psi vector: {0}")]
    InvalidKVector(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("x-truncation {given} below the sufficient bound {required}")]
    InsufficientXBound { given: u32, required: u32 },

    #[error("plain Feynman integral requires the zero genus function")]
    NonzeroGenusPlain,

    #[error("unsupported Eisenstein weight {0}")]
    UnsupportedWeight(u32),

    #[error("alpha_0 is not an operator of the Heisenberg algebra")]
    ZeroMode,

    #[error("Fock space graph restriction violated: {0}")]
    FockRestriction(String),

    #[error("partitions have different sizes {0} and {1}")]
    PartitionSizeMismatch(u32, u32),

    #[error("number of points {n} differs from 2g-2 for g = {g}")]
    PointCountMismatch { g: u32, n: u32 },

    #[error("quasimodular fit is underdetermined: {0}")]
    Underdetermined(String),
}
