//! Subject-agnostic machinery: executions, cost accounting, relation
//! application, and campaign aggregation.

pub mod campaign;
pub mod cost;
pub mod error;
pub mod exec;
pub mod relation;
pub mod rng;
pub mod subject;
pub mod verdict;

pub use campaign::{
    run_resolved_campaign, BuiltinFixture, CampaignConfig, CampaignOutcome, CampaignSubject,
    DetectionMatrix, FixtureOrigin, MatrixRow, RelationSelect, ReportEntry, ResolvedCampaign,
    SourceOverrides,
};
pub use cost::CostMeter;
pub use error::EngineError;
pub use exec::{Execution, Phase};
pub use relation::{apply_relation, oh_ratio, ApplyCtx, Relation, RelationDescriptor};
pub use subject::{run_subject, ExecutionOf, Subject, Variant};
pub use verdict::{Outcome, Verdict, VerdictKind};
