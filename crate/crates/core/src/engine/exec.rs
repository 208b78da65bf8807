//! Execution phases and the input-output record of one subject run.

use serde::{Deserialize, Serialize};

use super::cost::CostMeter;

/// Where the harness is running.
///
/// In `Production`, follow-up test cases must leave the subject's data view
/// untouched: any run that reports a data write is recorded as a phase
/// violation and the enclosing relation application fails with reason
/// `"production-write"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Testing,
    Production,
}

impl Phase {
    pub fn is_production(self) -> bool {
        matches!(self, Phase::Production)
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Testing => write!(f, "testing"),
            Phase::Production => write!(f, "production"),
        }
    }
}

/// One subject run: the input as the run left it, the output, and its cost.
///
/// `input` holds the data view *after* the run, so relations inspecting it
/// see any corruption a writing fault introduced. Re-running the same
/// variant on the same input in the same phase yields an identical record.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution<I, O> {
    pub input: I,
    pub output: O,
    pub cost: CostMeter,
    pub wrote_data: bool,
    pub phase: Phase,
}

impl<I, O> Execution<I, O> {
    /// True when this run wrote data while in production phase.
    pub fn phase_violation(&self) -> bool {
        self.wrote_data && self.phase.is_production()
    }
}
