//! Engine-level errors, kept distinct from test verdicts.
//!
//! A `Fail` verdict means a relation revealed a fault in the subject; an
//! [`EngineError`] means the harness itself was asked to do something it
//! cannot (bad input data, unknown identifiers, out-of-scope oracle calls).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    /// The input value violates the subject's input invariants.
    #[error("malformed input: {0}")]
    Input(String),

    /// Unknown or mismatched subject / variant / relation identifiers.
    #[error("config error: {0}")]
    Config(String),

    /// A data-writing run was requested in production phase.
    #[error("phase violation: {0}")]
    PhaseViolation(String),

    /// The oh ratio is not defined for this application.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// A brute-force oracle was asked to handle an instance beyond its size guard.
    #[error("oracle scope exceeded: {0}")]
    OracleScope(String),
}

impl EngineError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }
}
