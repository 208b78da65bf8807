//! Subject programs and their runnable variants.

use std::fmt::Debug;

use super::cost::CostMeter;
use super::error::EngineError;
use super::exec::{Execution, Phase};

/// A subject program family: its input and output value types.
pub trait Subject: 'static {
    type Input: Clone + Debug + PartialEq;
    type Output: Clone + Debug + PartialEq;

    /// Identifier used in configs, reports, and relation descriptors.
    fn name() -> &'static str;

    /// Checks the subject's input invariants (not charged to any meter).
    fn validate(input: &Self::Input) -> Result<(), EngineError>;
}

/// One concrete implementation of a subject: the correct program or a
/// named seeded fault, behind one uniform run interface.
pub trait Variant<S: Subject>: Sync {
    fn id(&self) -> &'static str;

    /// True when this implementation may write to its data view.
    fn may_write(&self) -> bool {
        false
    }

    /// Runs on `input`, charging steps to `meter`.
    ///
    /// The data view inside `input` is this run's private copy; writing
    /// faults mutate it in place and report the write through the returned
    /// flag.
    fn execute(&self, input: &mut S::Input, meter: &mut CostMeter) -> (S::Output, bool);
}

/// Shorthand for the execution record of subject `S`.
pub type ExecutionOf<S> = Execution<<S as Subject>::Input, <S as Subject>::Output>;

/// Runs one variant on one input and records the input-output pair.
///
/// Malformed input is an engine error, never a test verdict. Variants that
/// declare they may write are refused outright in production phase; an
/// *observed* write (`wrote_data` on the returned record) is judged where
/// relations are applied.
pub fn run_subject<S: Subject>(
    variant: &dyn Variant<S>,
    input: S::Input,
    phase: Phase,
) -> Result<ExecutionOf<S>, EngineError> {
    if phase.is_production() && variant.may_write() {
        return Err(EngineError::PhaseViolation(format!(
            "variant '{}' writes to its data view and cannot run in production phase",
            variant.id()
        )));
    }
    S::validate(&input)?;
    let mut meter = CostMeter::new();
    let mut data = input;
    let (output, wrote_data) = variant.execute(&mut data, &mut meter);
    Ok(Execution {
        input: data,
        output,
        cost: meter,
        wrote_data,
        phase,
    })
}
