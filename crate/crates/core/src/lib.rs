//! Metamorphic-testing harness core.
//!
//! Instead of judging a single output against an oracle, the harness
//! derives follow-up test cases from an (apparently successful)
//! input-output pair and checks relations the correct program must
//! satisfy: neighbor probes around a binary-search hit, occurrence
//! counting over sub-ranges, distance additivity along shortest paths,
//! row/column permutations of linear systems. Seeded faulty variants of
//! each subject demonstrate detection, and every run is metered so the
//! cost of deriving and checking can be compared against the cost of the
//! run it checks.

pub mod engine;
pub mod harness;
pub mod report;
pub mod subjects;

pub use engine::{
    apply_relation, oh_ratio, run_resolved_campaign, run_subject, CampaignConfig, CampaignOutcome,
    CostMeter, DetectionMatrix, EngineError, Execution, FixtureOrigin, MatrixRow, Outcome, Phase,
    Relation, RelationDescriptor, RelationSelect, ReportEntry, ResolvedCampaign, SourceOverrides,
    Subject, Variant, Verdict, VerdictKind,
};
pub use harness::{
    list_fixtures, run_campaign, run_campaign_outcome, subject_relations, subject_variants,
    FixtureCatalogEntry, SUBJECTS,
};
pub use report::{to_stable_json, MatrixMeta, MatrixReport, RunMeta, RunReport};
