//! Metamorphic relations and their application to a source execution.

use rand_chacha::ChaCha8Rng;

use super::cost::CostMeter;
use super::error::EngineError;
use super::exec::Phase;
use super::rng::relation_stream;
use super::subject::{run_subject, ExecutionOf, Subject, Variant};
use super::verdict::{Outcome, Verdict, VerdictKind};

/// Static description of one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDescriptor {
    /// Unique within its subject.
    pub id: &'static str,
    pub subject: &'static str,
    /// The fault class this relation is designed to reveal.
    pub suspected_error: &'static str,
    /// Whether the follow-up test cases are safe to run in production
    /// (they never write to the subject's data view themselves).
    pub production_safe: bool,
}

/// Context handed to a relation while it derives and checks follow-ups.
///
/// Derivation work (element reads, selections, scans) is charged to the
/// derive meter, expectation checks to the check meter. Follow-up subject
/// runs charge their own meters only, so subject steps are never
/// double-counted.
pub struct ApplyCtx<'a, S: Subject> {
    variant: &'a dyn Variant<S>,
    phase: Phase,
    rng: ChaCha8Rng,
    derive: CostMeter,
    check: CostMeter,
    followups: Vec<ExecutionOf<S>>,
    violation: bool,
}

impl<'a, S: Subject> ApplyCtx<'a, S> {
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn charge_derive(&mut self, n: u64) {
        self.derive.charge(n);
    }

    pub fn charge_check(&mut self, n: u64) {
        self.check.charge(n);
    }

    pub fn derive_steps(&self) -> u64 {
        self.derive.steps()
    }

    /// Runs the variant under test on a derived follow-up input.
    ///
    /// Returns the index of the recorded execution; the execution itself is
    /// read back via [`followup`](Self::followup) so the borrow on `self`
    /// stays short. In production phase a writing variant is refused and
    /// the refusal is recorded as a phase violation, failing the
    /// application with reason `"production-write"`.
    pub fn run_followup(&mut self, input: S::Input) -> Result<usize, EngineError> {
        if self.phase.is_production() && self.variant.may_write() {
            self.violation = true;
            return Err(EngineError::PhaseViolation(format!(
                "follow-up on writing variant '{}' refused in production phase",
                self.variant.id()
            )));
        }
        let exec = run_subject(self.variant, input, self.phase)?;
        if exec.phase_violation() {
            self.violation = true;
        }
        self.followups.push(exec);
        Ok(self.followups.len() - 1)
    }

    pub fn followup(&self, idx: usize) -> &ExecutionOf<S> {
        &self.followups[idx]
    }
}

/// A metamorphic relation for subject `S`.
///
/// `check` inspects the source input-output pair, optionally derives and
/// runs follow-up test cases through the context, and states the outcome.
/// It must return `Inapplicable` when its guard does not hold, and
/// `Abandoned` when a feasibility rule or budget stops the derivation.
pub trait Relation<S: Subject>: Sync {
    fn descriptor(&self) -> &RelationDescriptor;

    fn check(&self, source: &ExecutionOf<S>, ctx: &mut ApplyCtx<'_, S>) -> Outcome;
}

/// Applies one relation to one source execution.
///
/// The relation draws randomness from a stream derived from `seed` and its
/// own id. Phase rules are enforced here: a source that wrote data in
/// production fails immediately, and any follow-up that writes in
/// production forces a `"production-write"` failure regardless of what the
/// relation concluded.
pub fn apply_relation<S: Subject>(
    relation: &dyn Relation<S>,
    source: &ExecutionOf<S>,
    variant: &dyn Variant<S>,
    phase: Phase,
    seed: u64,
) -> Result<Verdict<S::Input, S::Output>, EngineError> {
    let desc = relation.descriptor();
    if desc.subject != S::name() {
        return Err(EngineError::config(format!(
            "relation '{}' belongs to subject '{}', not '{}'",
            desc.id,
            desc.subject,
            S::name()
        )));
    }

    let mut ctx = ApplyCtx {
        variant,
        phase,
        rng: relation_stream(seed, desc.id),
        derive: CostMeter::new(),
        check: CostMeter::new(),
        followups: Vec::new(),
        violation: false,
    };

    if phase.is_production() && !desc.production_safe {
        return Ok(finish(
            ctx,
            Outcome::Inapplicable("relation is not production-safe".into()),
        ));
    }
    if phase.is_production() && source.wrote_data {
        ctx.violation = true;
        return Ok(finish(ctx, Outcome::Fail("production-write".into())));
    }

    let outcome = relation.check(source, &mut ctx);
    Ok(finish(ctx, outcome))
}

fn finish<S: Subject>(ctx: ApplyCtx<'_, S>, outcome: Outcome) -> Verdict<S::Input, S::Output> {
    let (kind, reason) = if ctx.violation {
        (VerdictKind::Fail, "production-write".to_string())
    } else {
        match outcome {
            Outcome::Pass => (VerdictKind::Pass, String::new()),
            Outcome::Fail(reason) => (VerdictKind::Fail, reason),
            Outcome::Abandoned(reason) => (VerdictKind::Abandoned, reason),
            Outcome::Inapplicable(reason) => (VerdictKind::Inapplicable, reason),
        }
    };
    debug_assert!(kind != VerdictKind::Fail || !reason.is_empty());
    Verdict {
        kind,
        reason,
        derive_cost: ctx.derive,
        check_cost: ctx.check,
        followups: ctx.followups,
        phase_violation: ctx.violation,
    }
}

/// Ratio of derivation-plus-check steps to the source run's steps.
///
/// This is the recorded cost metric per application: below 1 means the
/// relation was cheaper than the run it checked. Not defined for
/// inapplicable or abandoned applications, nor for zero-cost sources.
pub fn oh_ratio<I, O>(verdict: &Verdict<I, O>, source_cost: CostMeter) -> Result<f64, EngineError> {
    match verdict.kind {
        VerdictKind::Inapplicable => {
            return Err(EngineError::UndefinedRatio(
                "relation was inapplicable".into(),
            ))
        }
        VerdictKind::Abandoned => {
            return Err(EngineError::UndefinedRatio(
                "derivation was abandoned".into(),
            ))
        }
        VerdictKind::Pass | VerdictKind::Fail => {}
    }
    if source_cost.steps() == 0 {
        return Err(EngineError::UndefinedRatio("source cost is zero".into()));
    }
    let work = verdict.derive_cost.steps() + verdict.check_cost.steps();
    Ok(work as f64 / source_cost.steps() as f64)
}
