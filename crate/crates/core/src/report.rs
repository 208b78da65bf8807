//! Assembled reports with stable serialization: identical runs must yield
//! byte-identical JSON.

use serde::{Deserialize, Serialize};

use crate::engine::{DetectionMatrix, Phase, ReportEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub phase: Phase,
    pub subject: String,
    pub variant: String,
    pub trials: u64,
    pub fixture: Option<String>,
}

/// Report of one `run` invocation: per-application entries plus the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub meta: RunMeta,
    pub entries: Vec<ReportEntry>,
    pub matrix: DetectionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub seed: u64,
    pub phase: Phase,
    pub subjects: Vec<String>,
    pub trials: u64,
}

/// Report of one `matrix` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub meta: MatrixMeta,
    pub matrix: DetectionMatrix,
}

/// Pretty JSON with a trailing newline; field order follows the struct
/// definitions, so equal values serialize to equal bytes.
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}
