use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use super::Finding;
use crate::artifact;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fpr: f64,
    pub fnr: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        EvalReport { tp, fp, tn, fn_, precision, recall, f1, fpr: ratio(fp, fp + tn), fnr: ratio(fn_, fn_ + tp) }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Statement key: contract id and inclusive line span.
pub type ItemKey = (String, u32, u32);

/// Labels for an evaluation set; `true` marks a real bug.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub labels: BTreeMap<ItemKey, bool>,
}

fn parse_span(s: &str) -> Option<(u32, u32)> {
    match s.split_once('-') {
        Some((a, b)) => Some((a.trim().parse().ok()?, b.trim().parse().ok()?)),
        None => {
            let n = s.trim().parse().ok()?;
            Some((n, n))
        }
    }
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "bug" | "yes" => Some(true),
        "0" | "false" | "clean" | "no" => Some(false),
        _ => None,
    }
}

impl GroundTruth {
    /// Tab-separated `contract_id`, `start-end` (or a single line), label.
    /// Labels are 1/0, true/false, bug/clean or yes/no. A first line
    /// starting with `contract` is a header.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut labels = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || (i == 0 && line.starts_with("contract")) {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = || format!("line {}: expected `contract_id<TAB>start-end<TAB>label`", i + 1);
            if cols.len() != 3 {
                return Err(bad());
            }
            let (s, e) = parse_span(cols[1]).ok_or_else(bad)?;
            let label = parse_label(cols[2]).ok_or_else(|| format!("line {}: unknown label `{}`", i + 1, cols[2]))?;
            if labels.insert((cols[0].to_string(), s, e), label).is_some() {
                return Err(format!("line {}: duplicate label for {}@{s}-{e}", i + 1, cols[0]));
            }
        }
        Ok(GroundTruth { labels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&artifact::read_to_string(path)?).map_err(|m| Error::format(path, m))
    }
}

/// Confusion counts of `findings` against `truth`. Every labeled item is
/// one evaluation case; an item is predicted positive when some finding
/// queries it.
pub fn eval_metrics(findings: &[Finding], truth: &GroundTruth) -> Result<EvalReport> {
    let predicted: BTreeSet<ItemKey> = findings
        .iter()
        .map(|f| (f.query.contract_id.clone(), f.query.line_start, f.query.line_end))
        .collect();
    let unlabeled: Vec<String> =
        predicted.iter().filter(|k| !truth.labels.contains_key(*k)).map(|(c, s, e)| format!("{c}@{s}-{e}")).collect();
    if !unlabeled.is_empty() {
        return Err(Error::Precondition(format!("findings on unlabeled statements: {}", unlabeled.join(", "))));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (key, &bug) in &truth.labels {
        match (predicted.contains(key), bug) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(EvalReport::from_counts(tp, fp, tn, fn_))
}
