//! Text formats for findings, pair scores and metrics.

use serde::Serialize;

use super::{CloneType, Finding, FindingKind};
use crate::embedding::ElementRef;
use crate::simindex::ScoredPair;

pub const FINDINGS_HEADER: &str = "kind\tquery_contract\tquery_lines\tmatch_id\tscore\tcategory\tclone_type";

/// One findings row with every column rendered as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FindingRow {
    pub kind: String,
    pub query_contract: String,
    pub query_lines: String,
    pub match_id: String,
    pub score: String,
    pub category: Option<String>,
    pub clone_type: Option<String>,
}

impl From<&Finding> for FindingRow {
    fn from(f: &Finding) -> Self {
        let match_id = match f.kind {
            FindingKind::Clone => f.matched.to_string(),
            FindingKind::Bug | FindingKind::Validation => f.matched.contract_id.clone(),
        };
        FindingRow {
            kind: f.kind.to_string(),
            query_contract: f.query.contract_id.clone(),
            query_lines: f.query.lines(),
            match_id,
            score: format!("{:.6}", f.score),
            category: f.category.map(|c| c.name().to_string()),
            clone_type: f.clone_type.map(|c| c.to_string()),
        }
    }
}

pub fn findings_tsv(findings: &[Finding]) -> String {
    let mut out = String::from(FINDINGS_HEADER);
    out.push('\n');
    for f in findings {
        let r = FindingRow::from(f);
        let cols = [
            r.kind.as_str(),
            &r.query_contract,
            &r.query_lines,
            &r.match_id,
            &r.score,
            r.category.as_deref().unwrap_or("-"),
            r.clone_type.as_deref().unwrap_or("-"),
        ];
        out.push_str(&cols.join("\t"));
        out.push('\n');
    }
    out
}

pub fn findings_json(findings: &[Finding]) -> String {
    let rows: Vec<FindingRow> = findings.iter().map(FindingRow::from).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("findings serialize");
    s.push('\n');
    s
}

fn parse_lines(s: &str) -> Option<(u32, u32)> {
    let (a, b) = s.split_once('-')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// `<id>@<a>_<b>` or `<id>@<a>-<b>` into its parts.
fn parse_ref(s: &str) -> Option<(&str, u32, u32)> {
    let (id, span) = s.rsplit_once('@')?;
    let (a, b) = span.split_once('_').or_else(|| span.split_once('-'))?;
    Some((id, a.parse().ok()?, b.parse().ok()?))
}

/// Reads a findings table written by [`findings_tsv`].
pub fn parse_findings_tsv(text: &str) -> Result<Vec<Finding>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || (i == 0 && line == FINDINGS_HEADER) {
            continue;
        }
        let bad = |what: &str| format!("line {}: bad {what}", i + 1);
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 7 {
            return Err(format!("line {}: expected 7 columns, found {}", i + 1, c.len()));
        }
        let kind = match c[0] {
            "clone" => FindingKind::Clone,
            "bug" => FindingKind::Bug,
            "validation" => FindingKind::Validation,
            _ => return Err(bad("kind")),
        };
        let (qs, qe) = parse_lines(c[2]).ok_or_else(|| bad("query_lines"))?;
        let category = match c[5] {
            "-" | "" => None,
            s => Some(s.parse().map_err(|e: String| format!("line {}: {e}", i + 1))?),
        };
        let matched = match kind {
            FindingKind::Clone => {
                let (id, a, b) = parse_ref(c[3]).ok_or_else(|| bad("match_id"))?;
                ElementRef::new(id, a, b)
            }
            _ => {
                let (_, a, b) = parse_ref(c[3]).ok_or_else(|| bad("match_id"))?;
                ElementRef { tag: category.map(|c: crate::bugdb::Category| c.name().to_string()), ..ElementRef::new(c[3], a, b) }
            }
        };
        out.push(Finding {
            kind,
            query: ElementRef::new(c[1], qs, qe),
            matched,
            score: c[4].parse().map_err(|_| bad("score"))?,
            category,
            clone_type: match c[6] {
                "-" | "" => None,
                s => Some(s.parse::<CloneType>()?),
            },
        });
    }
    Ok(out)
}

pub const PAIRS_HEADER: &str = "query_contract\tquery_key\ttarget_contract\ttarget_key\tscore";

pub fn pairs_tsv(pairs: &[ScoredPair]) -> String {
    let mut out = String::from(PAIRS_HEADER);
    out.push('\n');
    for p in pairs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.6}\n",
            p.query.contract_id,
            p.query.key(),
            p.target.contract_id,
            p.target.key(),
            p.score
        ));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
