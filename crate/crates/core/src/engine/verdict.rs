//! Verdicts of relation applications.

use serde::{Deserialize, Serialize};

use super::cost::CostMeter;
use super::exec::Execution;

/// Outcome class of one relation application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    /// Every expectation held.
    Pass,
    /// An expectation was violated: an error was revealed.
    Fail,
    /// A derivation budget or feasibility rule triggered before checking.
    Abandoned,
    /// The relation's guard does not hold for this input-output pair.
    Inapplicable,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictKind::Pass => write!(f, "pass"),
            VerdictKind::Fail => write!(f, "fail"),
            VerdictKind::Abandoned => write!(f, "abandoned"),
            VerdictKind::Inapplicable => write!(f, "inapplicable"),
        }
    }
}

/// What a relation decided, before the engine attaches cost accounting.
///
/// `Fail` and `Abandoned` carry a reason naming the violated expectation or
/// the triggered budget; neither state is ever produced silently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Abandoned(String),
    Inapplicable(String),
}

/// Full record of one relation application.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<I, O> {
    pub kind: VerdictKind,
    pub reason: String,
    pub derive_cost: CostMeter,
    pub check_cost: CostMeter,
    pub followups: Vec<Execution<I, O>>,
    /// True when a data write was observed in production phase.
    pub phase_violation: bool,
}

impl<I, O> Verdict<I, O> {
    pub fn is_fail(&self) -> bool {
        self.kind == VerdictKind::Fail
    }

    pub fn is_pass(&self) -> bool {
        self.kind == VerdictKind::Pass
    }
}
