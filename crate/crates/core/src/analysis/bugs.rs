use serde::Serialize;

use super::{sort_findings, Finding, FindingKind};
use crate::bugdb::{check_version, resolve_unit, BugRecord, Category};
use crate::embedding::{compose, Composer, ElementRef, EmbeddingMatrix, EmbeddingModel};
use crate::error::{Error, Result};
use crate::parser;
use crate::simindex::{check_threshold, nearest, passes, similarity_f32, threshold_scan};
use crate::tokenizer::{normalize, serialize_statement, streams_of, Level, Mode};

fn category_of(bug: &ElementRef) -> Result<Category> {
    let tag = bug
        .tag
        .as_deref()
        .ok_or_else(|| Error::Precondition(format!("bug row {} has no category", bug.contract_id)))?;
    tag.parse().map_err(Error::Precondition)
}

fn check_pair(statements: &EmbeddingMatrix, bugs: &EmbeddingMatrix) -> Result<()> {
    if statements.level != Level::Statement || bugs.level != Level::Statement {
        return Err(Error::Config("bug queries need statement-level matrices".into()));
    }
    if statements.mode != bugs.mode {
        return Err(Error::Config(format!(
            "statement matrix is {} but bug matrix is {}; build both in the same mode",
            statements.mode, bugs.mode
        )));
    }
    check_version(bugs, &statements.model_version)
}

/// Every (statement, bug) pair clearing `delta`.
pub fn detect_bugs(statements: &EmbeddingMatrix, bugs: &EmbeddingMatrix, delta: f64) -> Result<Vec<Finding>> {
    check_pair(statements, bugs)?;
    let mut findings = Vec::new();
    for p in threshold_scan(statements, bugs, delta, |_, _| false)? {
        findings.push(Finding {
            kind: FindingKind::Bug,
            category: Some(category_of(&p.target)?),
            query: p.query,
            matched: p.target,
            score: p.score,
            clone_type: None,
        });
    }
    sort_findings(&mut findings);
    Ok(findings)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub contract_id: String,
    /// Every statement unit that was checked, in source order.
    pub statements: Vec<ElementRef>,
    /// At most one finding per statement: its best bug over the threshold.
    pub findings: Vec<Finding>,
}

impl Validation {
    pub fn flagged(&self) -> bool {
        !self.findings.is_empty()
    }
}

/// Checks each statement of `source` against the bug matrix.
pub fn validate_contract(
    source: &str,
    contract_id: &str,
    model: &EmbeddingModel,
    bugs: &EmbeddingMatrix,
    delta: f64,
) -> Result<Validation> {
    check_threshold(delta)?;
    check_version(bugs, model.version())?;
    if bugs.level != Level::Statement {
        return Err(Error::Config("validation needs a statement-level bug matrix".into()));
    }
    let tree = parser::parse(source).map_err(|e| Error::Parse { path: contract_id.into(), source: e })?;
    let mut composer = Composer::new(model);
    let mut statements = Vec::new();
    let mut findings = Vec::new();
    for s in streams_of(&tree, contract_id, Level::Statement, bugs.mode) {
        let s = normalize(&s);
        let query = ElementRef::new(contract_id, s.line_start, s.line_end);
        let row = composer.compose(&s.words()).to_f32();
        if let Some((j, score)) = nearest(&row, bugs).filter(|(_, score)| passes(*score, delta)) {
            findings.push(Finding {
                kind: FindingKind::Validation,
                query: query.clone(),
                matched: bugs.index[j].clone(),
                score,
                category: Some(category_of(&bugs.index[j])?),
                clone_type: None,
            });
        }
        statements.push(query);
    }
    Ok(Validation { contract_id: contract_id.to_string(), statements, findings })
}

/// Score between a bug's statement and the statement at `start..=end` of
/// `fixed_source`.
pub fn compare_fix(
    model: &EmbeddingModel,
    bug: &BugRecord,
    fixed_source: &str,
    start: u32,
    end: u32,
    mode: Mode,
) -> Result<f64> {
    let tree = parser::parse(fixed_source).map_err(|e| Error::Parse { path: "<fixed source>".into(), source: e })?;
    let unit = resolve_unit(&tree, start, end)?;
    let fixed = normalize(&serialize_statement(&unit, mode, "fixed"));
    let a = compose(model, &bug.stream(mode)?.words()).to_f32();
    let b = compose(model, &fixed.words()).to_f32();
    Ok(similarity_f32(&a, &b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationCounts {
    pub structural: usize,
    pub basic: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ablation {
    pub structural: Vec<Finding>,
    pub basic: Vec<Finding>,
}

impl Ablation {
    pub fn counts(&self) -> AblationCounts {
        AblationCounts { structural: self.structural.len(), basic: self.basic.len() }
    }
}

/// Bug detection over the same corpus with and without structural context.
pub fn ablation_run(
    structural_statements: &EmbeddingMatrix,
    structural_bugs: &EmbeddingMatrix,
    basic_statements: &EmbeddingMatrix,
    basic_bugs: &EmbeddingMatrix,
    delta: f64,
) -> Result<Ablation> {
    for (m, want) in [
        (structural_statements, Mode::Structural),
        (structural_bugs, Mode::Structural),
        (basic_statements, Mode::Basic),
        (basic_bugs, Mode::Basic),
    ] {
        if m.mode != want {
            return Err(Error::Config(format!("ablation expected a {want} matrix but got a {} one", m.mode)));
        }
    }
    Ok(Ablation {
        structural: detect_bugs(structural_statements, structural_bugs, delta)?,
        basic: detect_bugs(basic_statements, basic_bugs, delta)?,
    })
}
