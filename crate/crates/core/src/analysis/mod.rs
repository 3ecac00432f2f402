//! Clone detection, bug detection, contract validation and evaluation.

mod bugs;
mod clone_type;
mod clones;
mod erc20;
mod metrics;
pub mod report;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use bugs::{ablation_run, compare_fix, detect_bugs, validate_contract, Ablation, AblationCounts, Validation};
pub use clone_type::{annotate_clone_types, classify_clone_type, edit_similarity, span_tokens, unit_tokens, DEFAULT_EDIT_CUTOFF};
pub use clones::{detect_clones, sample_contracts, CloneOptions, CloneStats};
pub use erc20::{erc20_check, ERC20_FUNCTIONS};
pub use metrics::{eval_metrics, EvalReport, GroundTruth};

use crate::bugdb::Category;
use crate::embedding::ElementRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FindingKind {
    Clone,
    Bug,
    Validation,
}

impl FindingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingKind::Clone => "clone",
            FindingKind::Bug => "bug",
            FindingKind::Validation => "validation",
        }
    }
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Grade of similarity between a finding's two fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CloneType {
    /// Identical raw tokens.
    I,
    /// Equal once identifiers, literals and elementary types are abstracted.
    II,
    /// Close in edit distance.
    #[serde(rename = "III_IV")]
    IiiIv,
    #[serde(rename = "not_clone")]
    NotClone,
}

impl CloneType {
    pub fn as_str(self) -> &'static str {
        match self {
            CloneType::I => "I",
            CloneType::II => "II",
            CloneType::IiiIv => "III_IV",
            CloneType::NotClone => "not_clone",
        }
    }
}

impl fmt::Display for CloneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(CloneType::I),
            "II" => Ok(CloneType::II),
            "III_IV" => Ok(CloneType::IiiIv),
            "not_clone" => Ok(CloneType::NotClone),
            _ => Err(format!("unknown clone type `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub kind: FindingKind,
    pub query: ElementRef,
    /// For bug and validation findings, `contract_id` holds the bug_id.
    pub matched: ElementRef,
    pub score: f64,
    pub category: Option<Category>,
    pub clone_type: Option<CloneType>,
}

impl Finding {
    /// Key of the queried element, `<contract>@<start>_<end>`.
    pub fn query_key(&self) -> String {
        self.query.to_string()
    }
}

/// Report order: kind, query, descending score, match.
pub(crate) fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then_with(|| a.query.cmp(&b.query))
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.matched.cmp(&b.matched))
    });
}
