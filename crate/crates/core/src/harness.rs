//! Name-keyed dispatch from campaign configs into the typed machinery,
//! plus the built-in fixture catalog.

use crate::engine::campaign::run_resolved_campaign;
use crate::engine::{
    CampaignConfig, CampaignOutcome, CampaignSubject, DetectionMatrix, EngineError, FixtureOrigin,
    ResolvedCampaign, SourceOverrides,
};
use crate::subjects::binsearch::BinSearch;
use crate::subjects::kth::KthOccurrence;
use crate::subjects::linear_solver::GaussianElimination;
use crate::subjects::shortest_path::ShortestPath;

/// Every subject the harness knows, in display order.
pub const SUBJECTS: [&str; 4] = ["binsearch", "kth", "shortest-path", "gauss"];

/// One row of the `fixtures` listing.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FixtureCatalogEntry {
    pub id: &'static str,
    pub subject: &'static str,
    pub origin: FixtureOrigin,
    pub summary: String,
}

/// All built-in fixtures with provenance notes.
pub fn list_fixtures() -> Vec<FixtureCatalogEntry> {
    fn entries<S: CampaignSubject>() -> Vec<FixtureCatalogEntry> {
        S::builtin_fixtures()
            .into_iter()
            .map(|b| FixtureCatalogEntry {
                id: b.id,
                subject: S::name(),
                origin: b.origin,
                summary: b.summary,
            })
            .collect()
    }
    let mut out = Vec::new();
    out.extend(entries::<BinSearch>());
    out.extend(entries::<KthOccurrence>());
    out.extend(entries::<ShortestPath>());
    out.extend(entries::<GaussianElimination>());
    out
}

/// Variant ids known for a subject.
pub fn subject_variants(subject: &str) -> Result<Vec<&'static str>, EngineError> {
    fn ids<S: CampaignSubject>() -> Vec<&'static str> {
        S::variants().iter().map(|v| v.id()).collect()
    }
    match subject {
        "binsearch" => Ok(ids::<BinSearch>()),
        "kth" => Ok(ids::<KthOccurrence>()),
        "shortest-path" => Ok(ids::<ShortestPath>()),
        "gauss" => Ok(ids::<GaussianElimination>()),
        other => Err(EngineError::config(format!("unknown subject '{other}'"))),
    }
}

/// Relation ids known for a subject.
pub fn subject_relations(subject: &str) -> Result<Vec<&'static str>, EngineError> {
    fn ids<S: CampaignSubject>() -> Vec<&'static str> {
        S::relations().iter().map(|r| r.descriptor().id).collect()
    }
    match subject {
        "binsearch" => Ok(ids::<BinSearch>()),
        "kth" => Ok(ids::<KthOccurrence>()),
        "shortest-path" => Ok(ids::<ShortestPath>()),
        "gauss" => Ok(ids::<GaussianElimination>()),
        other => Err(EngineError::config(format!("unknown subject '{other}'"))),
    }
}

fn resolve_fixture<S: CampaignSubject>(
    spec: Option<&str>,
) -> Result<Option<S::Fixture>, EngineError> {
    let spec = match spec {
        None => return Ok(None),
        Some(s) => s,
    };
    if let Some(builtin) = S::builtin_fixtures().into_iter().find(|b| b.id == spec) {
        return Ok(Some(builtin.value));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| {
        EngineError::config(format!(
            "fixture '{spec}' is neither a built-in id nor a readable file: {e}"
        ))
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| EngineError::config(format!("fixture '{spec}' is not valid JSON: {e}")))?;
    Ok(Some(S::parse_fixture(&value)?))
}

fn run_for<S: CampaignSubject>(
    config: &CampaignConfig,
    overrides: &SourceOverrides,
) -> Result<CampaignOutcome, EngineError> {
    let fixture = resolve_fixture::<S>(config.fixture.as_deref())?;
    let resolved = ResolvedCampaign::<S>::from_config(config, fixture, overrides)?;
    run_resolved_campaign(&resolved)
}

/// Runs a campaign described by a config document, with optional pinned
/// source inputs.
pub fn run_campaign_outcome(
    config: &CampaignConfig,
    overrides: &SourceOverrides,
) -> Result<CampaignOutcome, EngineError> {
    match config.subject.as_str() {
        "binsearch" => run_for::<BinSearch>(config, overrides),
        "kth" => run_for::<KthOccurrence>(config, overrides),
        "shortest-path" => run_for::<ShortestPath>(config, overrides),
        "gauss" => run_for::<GaussianElimination>(config, overrides),
        other => Err(EngineError::config(format!("unknown subject '{other}'"))),
    }
}

/// Runs a campaign and returns its detection matrix.
pub fn run_campaign(config: &CampaignConfig) -> Result<DetectionMatrix, EngineError> {
    Ok(run_campaign_outcome(config, &SourceOverrides::default())?.matrix)
}
