//! Campaigns: repeated trials of (source run, relation applications) with
//! aggregate detection accounting.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error::EngineError;
use super::exec::Phase;
use super::relation::{apply_relation, oh_ratio, Relation};
use super::rng::{source_stream, trial_seed};
use super::subject::{run_subject, Subject, Variant};
use super::verdict::VerdictKind;

/// Which relations a campaign applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationSelect {
    Keyword(SelectKeyword),
    Named(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectKeyword {
    All,
}

impl RelationSelect {
    pub fn all() -> Self {
        RelationSelect::Keyword(SelectKeyword::All)
    }

    pub fn named<I: IntoIterator<Item = T>, T: Into<String>>(ids: I) -> Self {
        RelationSelect::Named(ids.into_iter().map(Into::into).collect())
    }

    pub fn is_all(&self) -> bool {
        matches!(self, RelationSelect::Keyword(SelectKeyword::All))
    }
}

/// Campaign configuration, loadable from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub subject: String,
    /// Variant ids to exercise; empty means every known variant.
    pub variants: Vec<String>,
    pub relations: RelationSelect,
    pub trials: u64,
    pub seed: u64,
    pub phase: Phase,
    /// Built-in fixture id or a path to a fixture JSON file.
    #[serde(default)]
    pub fixture: Option<String>,
}

/// Per-subject source-input overrides (CLI flags like `--key`),
/// pinning the source test case instead of generating one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceOverrides {
    pub key: Option<i64>,
    pub k: Option<u64>,
    pub src: Option<String>,
    pub dst: Option<String>,
}

impl SourceOverrides {
    pub fn is_empty(&self) -> bool {
        self.key.is_none() && self.k.is_none() && self.src.is_none() && self.dst.is_none()
    }
}

/// One per-application record in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub relation_id: String,
    pub trial: u64,
    pub verdict: VerdictKind,
    pub reason: String,
    pub source_cost: u64,
    pub derive_cost: u64,
    pub check_cost: u64,
    pub oh_ratio: Option<f64>,
}

/// Aggregate of one (variant, relation) pair over a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub subject: String,
    pub variant: String,
    pub relation: String,
    pub trials: u64,
    pub passes: u64,
    pub fails: u64,
    pub abandoned: u64,
    pub inapplicable: u64,
    /// Mean of (derive+check)/source over applications where the ratio is
    /// defined (pass or fail verdicts with a nonzero source cost).
    pub mean_oh_ratio: Option<f64>,
}

/// Detection matrix: rows keyed by (subject, variant, relation), in
/// deterministic sorted order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionMatrix {
    pub rows: Vec<MatrixRow>,
}

impl DetectionMatrix {
    pub fn row(&self, variant: &str, relation: &str) -> Option<&MatrixRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.relation == relation)
    }

    /// Merges another matrix into this one; associative, so partial
    /// matrices from independent trial batches can be combined in any
    /// grouping.
    pub fn merge(&mut self, other: DetectionMatrix) {
        let mut builder = MatrixBuilder::default();
        for row in self.rows.drain(..).chain(other.rows) {
            builder.absorb(row);
        }
        *self = builder.finish();
    }

    pub fn total_fails(&self) -> u64 {
        self.rows.iter().map(|r| r.fails).sum()
    }
}

#[derive(Default)]
pub(crate) struct MatrixBuilder {
    cells: BTreeMap<(String, String, String), Tally>,
}

#[derive(Default, Clone)]
struct Tally {
    trials: u64,
    passes: u64,
    fails: u64,
    abandoned: u64,
    inapplicable: u64,
    ratio_sum: f64,
    ratio_count: u64,
}

impl MatrixBuilder {
    pub(crate) fn record(
        &mut self,
        subject: &str,
        variant: &str,
        relation: &str,
        verdict: VerdictKind,
        ratio: Option<f64>,
    ) {
        let cell = self
            .cells
            .entry((subject.into(), variant.into(), relation.into()))
            .or_default();
        cell.trials += 1;
        match verdict {
            VerdictKind::Pass => cell.passes += 1,
            VerdictKind::Fail => cell.fails += 1,
            VerdictKind::Abandoned => cell.abandoned += 1,
            VerdictKind::Inapplicable => cell.inapplicable += 1,
        }
        if let Some(r) = ratio {
            cell.ratio_sum += r;
            cell.ratio_count += 1;
        }
    }

    fn absorb(&mut self, row: MatrixRow) {
        let cell = self
            .cells
            .entry((row.subject, row.variant, row.relation))
            .or_default();
        cell.trials += row.trials;
        cell.passes += row.passes;
        cell.fails += row.fails;
        cell.abandoned += row.abandoned;
        cell.inapplicable += row.inapplicable;
        // mean folds back into a sum; counts are the defined-ratio trials
        if let Some(mean) = row.mean_oh_ratio {
            let n = row.passes + row.fails;
            cell.ratio_sum += mean * n as f64;
            cell.ratio_count += n;
        }
    }

    pub(crate) fn finish(self) -> DetectionMatrix {
        let rows = self
            .cells
            .into_iter()
            .map(|((subject, variant, relation), t)| MatrixRow {
                subject,
                variant,
                relation,
                trials: t.trials,
                passes: t.passes,
                fails: t.fails,
                abandoned: t.abandoned,
                inapplicable: t.inapplicable,
                mean_oh_ratio: if t.ratio_count > 0 {
                    Some(t.ratio_sum / t.ratio_count as f64)
                } else {
                    None
                },
            })
            .collect();
        DetectionMatrix { rows }
    }
}

/// Everything a campaign produced: the matrix plus per-application entries
/// grouped by variant (in configured order).
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub matrix: DetectionMatrix,
    pub per_variant_entries: Vec<(String, Vec<ReportEntry>)>,
}

impl CampaignOutcome {
    pub fn total_fails(&self) -> u64 {
        self.matrix.total_fails()
    }
}

/// A subject wired into the campaign machinery: its variant and relation
/// catalogs, fixture schema, and source-input generation.
pub trait CampaignSubject: Subject + Sized {
    /// The data part of an input (array, graph, linear system).
    type Fixture: Clone;

    fn variants() -> Vec<Box<dyn Variant<Self>>>;
    fn relations() -> Vec<Box<dyn Relation<Self>>>;

    /// Built-in fixtures shipped with the harness.
    fn builtin_fixtures() -> Vec<BuiltinFixture<Self::Fixture>>;

    /// Parses a fixture from its JSON representation.
    fn parse_fixture(value: &serde_json::Value) -> Result<Self::Fixture, EngineError>;

    /// Generates a source input: over `fixture` when given, otherwise over
    /// a fresh random instance.
    fn generate_input(rng: &mut ChaCha8Rng, fixture: Option<&Self::Fixture>) -> Self::Input;

    /// Builds the pinned source input requested by CLI-style overrides.
    fn input_from_overrides(
        fixture: &Self::Fixture,
        overrides: &SourceOverrides,
    ) -> Result<Self::Input, EngineError>;
}

/// Where a built-in fixture comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureOrigin {
    /// Values quoted from the published worked examples.
    Paper,
    /// Values constructed for this harness and validated by an oracle.
    Derived,
}

impl std::fmt::Display for FixtureOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FixtureOrigin::Paper => write!(f, "paper"),
            FixtureOrigin::Derived => write!(f, "derived"),
        }
    }
}

pub struct BuiltinFixture<F> {
    pub id: &'static str,
    pub origin: FixtureOrigin,
    pub summary: String,
    pub value: F,
}

/// Fully resolved campaign parameters for one subject, ready to run.
pub struct ResolvedCampaign<S: CampaignSubject> {
    pub variants: Vec<Box<dyn Variant<S>>>,
    pub relations: Vec<Box<dyn Relation<S>>>,
    pub trials: u64,
    pub seed: u64,
    pub phase: Phase,
    pub fixture: Option<S::Fixture>,
    /// When set, every trial uses this exact source input.
    pub pinned_input: Option<S::Input>,
}

impl<S: CampaignSubject> ResolvedCampaign<S> {
    /// Resolves ids from a campaign config against the subject's catalogs.
    pub fn from_config(
        config: &CampaignConfig,
        fixture: Option<S::Fixture>,
        overrides: &SourceOverrides,
    ) -> Result<Self, EngineError> {
        if config.subject != S::name() {
            return Err(EngineError::config(format!(
                "config subject '{}' does not match '{}'",
                config.subject,
                S::name()
            )));
        }
        if config.trials < 1 {
            return Err(EngineError::config("trials must be at least 1"));
        }

        let mut variants = S::variants();
        if !config.variants.is_empty() {
            let known: Vec<&'static str> = variants.iter().map(|v| v.id()).collect();
            for id in &config.variants {
                if !known.contains(&id.as_str()) {
                    return Err(EngineError::config(format!(
                        "unknown variant '{id}' for subject '{}'",
                        S::name()
                    )));
                }
            }
            variants.retain(|v| config.variants.iter().any(|id| id == v.id()));
            // keep configured order
            variants.sort_by_key(|v| config.variants.iter().position(|id| id == v.id()));
        }

        if config.phase.is_production() {
            if let Some(writer) = variants.iter().find(|v| v.may_write()) {
                return Err(EngineError::PhaseViolation(format!(
                    "variant '{}' writes to its data view and cannot run in production phase",
                    writer.id()
                )));
            }
        }

        let mut relations = S::relations();
        if let RelationSelect::Named(ids) = &config.relations {
            let known: Vec<&'static str> = relations.iter().map(|r| r.descriptor().id).collect();
            for id in ids {
                if !known.contains(&id.as_str()) {
                    return Err(EngineError::config(format!(
                        "unknown relation '{id}' for subject '{}'",
                        S::name()
                    )));
                }
            }
            relations.retain(|r| ids.iter().any(|id| id == r.descriptor().id));
            relations.sort_by_key(|r| ids.iter().position(|id| id == r.descriptor().id));
        }

        let pinned_input = if overrides.is_empty() {
            None
        } else {
            let fx = fixture.as_ref().ok_or_else(|| {
                EngineError::config("source overrides require a fixture".to_string())
            })?;
            Some(S::input_from_overrides(fx, overrides)?)
        };

        Ok(Self {
            variants,
            relations,
            trials: config.trials,
            seed: config.seed,
            phase: config.phase,
            fixture,
            pinned_input,
        })
    }
}

/// Runs a resolved campaign: for each trial, generate or load a source
/// input, run the subject, apply every selected relation, and accumulate
/// the matrix. Deterministic for a fixed seed.
pub fn run_resolved_campaign<S: CampaignSubject>(
    campaign: &ResolvedCampaign<S>,
) -> Result<CampaignOutcome, EngineError> {
    let mut builder = MatrixBuilder::default();
    let mut per_variant_entries = Vec::new();

    for variant in &campaign.variants {
        let mut entries = Vec::new();
        for trial in 0..campaign.trials {
            let tseed = trial_seed(campaign.seed, trial);
            let input = match &campaign.pinned_input {
                Some(input) => input.clone(),
                None => S::generate_input(&mut source_stream(tseed), campaign.fixture.as_ref()),
            };
            let source = run_subject(variant.as_ref(), input, campaign.phase)?;
            for relation in &campaign.relations {
                let verdict = apply_relation(
                    relation.as_ref(),
                    &source,
                    variant.as_ref(),
                    campaign.phase,
                    tseed,
                )?;
                let ratio = oh_ratio(&verdict, source.cost).ok();
                builder.record(
                    S::name(),
                    variant.id(),
                    relation.descriptor().id,
                    verdict.kind,
                    ratio,
                );
                entries.push(ReportEntry {
                    relation_id: relation.descriptor().id.to_string(),
                    trial,
                    verdict: verdict.kind,
                    reason: verdict.reason,
                    source_cost: source.cost.steps(),
                    derive_cost: verdict.derive_cost.steps(),
                    check_cost: verdict.check_cost.steps(),
                    oh_ratio: ratio,
                });
            }
        }
        per_variant_entries.push((variant.id().to_string(), entries));
    }

    Ok(CampaignOutcome {
        matrix: builder.finish(),
        per_variant_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_select_parses_keyword_and_list() {
        let all: RelationSelect = serde_json::from_str("\"all\"").unwrap();
        assert!(all.is_all());
        let named: RelationSelect = serde_json::from_str("[\"gap-probe\"]").unwrap();
        assert_eq!(named, RelationSelect::named(["gap-probe"]));
        assert_eq!(serde_json::to_string(&all).unwrap(), "\"all\"");
    }

    #[test]
    fn matrix_rows_account_for_every_trial() {
        let mut b = MatrixBuilder::default();
        b.record("s", "v", "r", VerdictKind::Pass, Some(0.5));
        b.record("s", "v", "r", VerdictKind::Fail, Some(1.5));
        b.record("s", "v", "r", VerdictKind::Abandoned, None);
        b.record("s", "v", "r", VerdictKind::Inapplicable, None);
        let m = b.finish();
        let row = m.row("v", "r").unwrap();
        assert_eq!(row.trials, 4);
        assert_eq!(
            row.passes + row.fails + row.abandoned + row.inapplicable,
            row.trials
        );
        assert_eq!(row.mean_oh_ratio, Some(1.0));
    }

    #[test]
    fn merge_is_associative_on_tallies() {
        let mut b1 = MatrixBuilder::default();
        b1.record("s", "v", "r", VerdictKind::Pass, Some(0.25));
        let m1 = b1.finish();
        let mut b2 = MatrixBuilder::default();
        b2.record("s", "v", "r", VerdictKind::Fail, Some(0.75));
        b2.record("s", "v", "q", VerdictKind::Pass, None);
        let m2 = b2.finish();

        let mut left = m1.clone();
        left.merge(m2.clone());
        let mut right = m2;
        right.merge(m1);
        assert_eq!(left.rows.len(), right.rows.len());
        let l = left.row("v", "r").unwrap();
        assert_eq!(l.trials, 2);
        assert_eq!(l.mean_oh_ratio, Some(0.5));
    }
}
