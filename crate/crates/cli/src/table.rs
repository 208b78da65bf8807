//! Human-oriented table rendering. Unlike the JSON reports, this layout is
//! not covered by byte-stability guarantees and may change freely.

use metamorph_core::{DetectionMatrix, FixtureCatalogEntry, ReportEntry};

fn ratio_cell(ratio: Option<f64>) -> String {
    match ratio {
        Some(r) => format!("{r:.3}"),
        None => "-".to_string(),
    }
}

pub fn render_entries(entries: &[ReportEntry]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<18} {:>5} {:<12} {:>8} {:>8} {:>7} {:>8}  {}\n",
        "relation", "trial", "verdict", "src-cost", "drv-cost", "chk-cost", "oh-ratio", "reason"
    ));
    for e in entries {
        out.push_str(&format!(
            "{:<18} {:>5} {:<12} {:>8} {:>8} {:>7} {:>8}  {}\n",
            e.relation_id,
            e.trial,
            e.verdict.to_string(),
            e.source_cost,
            e.derive_cost,
            e.check_cost,
            ratio_cell(e.oh_ratio),
            e.reason
        ));
    }
    out
}

pub fn render_matrix(matrix: &DetectionMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:<18} {:<18} {:>6} {:>6} {:>6} {:>9} {:>12} {:>8}\n",
        "subject",
        "variant",
        "relation",
        "trials",
        "pass",
        "fail",
        "abandoned",
        "inapplicable",
        "mean-oh"
    ));
    for row in &matrix.rows {
        out.push_str(&format!(
            "{:<14} {:<18} {:<18} {:>6} {:>6} {:>6} {:>9} {:>12} {:>8}\n",
            row.subject,
            row.variant,
            row.relation,
            row.trials,
            row.passes,
            row.fails,
            row.abandoned,
            row.inapplicable,
            ratio_cell(row.mean_oh_ratio)
        ));
    }
    out
}

pub fn render_fixtures(fixtures: &[FixtureCatalogEntry]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:<14} {:<8} {}\n",
        "id", "subject", "origin", "summary"
    ));
    for fx in fixtures {
        out.push_str(&format!(
            "{:<12} {:<14} {:<8} {}\n",
            fx.id,
            fx.subject,
            fx.origin.to_string(),
            fx.summary
        ));
    }
    out
}
