use thiserror::Error;

/// Errors produced by the analyses in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum JsrError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("enumeration budget exceeded: {requested} products requested (|M| = {members}, k = {depth}), budget is {budget}")]
    BudgetExceeded {
        requested: u128,
        members: usize,
        depth: usize,
        budget: u64,
    },

    #[error("inconclusive: {reason}")]
    Inconclusive { reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl JsrError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        JsrError::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        JsrError::Precondition(msg.into())
    }

    pub(crate) fn inconclusive(reason: impl Into<String>) -> Self {
        JsrError::Inconclusive {
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, JsrError>;
