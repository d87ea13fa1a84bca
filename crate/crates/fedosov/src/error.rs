//! Error types shared by the engine modules.

use crate::algebra::literal::LiteralError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("chart dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("series has no inverse: constant coefficient is not a nonzero scalar")]
    NotInvertible,
    #[error("form is not closed")]
    NotClosed,
    #[error("form degree {0} exceeds the chart dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("ordering tag mismatch")]
    TagMismatch,
    #[error(transparent)]
    Parse(#[from] LiteralError),
}

/// Failures of the higher-level constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid connection: {0}")]
    InvalidConnection(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("linear system is infeasible: {0}")]
    Infeasible(String),
    #[error("iteration did not stabilize: {0}")]
    NonConvergence(String),
}

impl From<LiteralError> for EngineError {
    fn from(e: LiteralError) -> Self {
        EngineError::Algebra(AlgebraError::Parse(e))
    }
}
