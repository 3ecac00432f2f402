//! Database of known buggy statements.

mod category;
pub mod exemplars;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use category::{Category, Split};

use crate::artifact;
use crate::embedding::{Composer, ElementRef, EmbeddingMatrix, EmbeddingModel};
use crate::error::{Error, Result};
use crate::parser::{self, ParseTree, StatementUnit};
use crate::tokenizer::{normalize, serialize_statement, Level, Mode, TokenStream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugRecord {
    /// `<ContractName>@<line_start>-<line_end>`
    pub bug_id: String,
    pub category: Category,
    pub contract_name: String,
    pub line_start: u32,
    pub line_end: u32,
    pub statement_source: String,
    pub split: Split,
    /// Version of the model the record's vector was last built with.
    pub model_version: Option<String>,
    /// Raw structural tokens, for auditing.
    pub tokens: Vec<String>,
    /// The whole source file the statement was taken from.
    pub context_source: String,
}

impl BugRecord {
    pub fn element_ref(&self) -> ElementRef {
        ElementRef {
            contract_id: self.bug_id.clone(),
            line_start: self.line_start,
            line_end: self.line_end,
            tag: Some(self.category.name().to_string()),
        }
    }

    fn tree(&self) -> Result<ParseTree> {
        parser::parse(&self.context_source)
            .map_err(|e| Error::Parse { path: format!("<bug {}>", self.bug_id).into(), source: e })
    }

    /// The record's serialized, unnormalized statement stream.
    pub fn raw_stream(&self, mode: Mode) -> Result<TokenStream> {
        let tree = self.tree()?;
        let unit = resolve_unit(&tree, self.line_start, self.line_end)?;
        Ok(serialize_statement(&unit, mode, &self.bug_id))
    }

    pub fn stream(&self, mode: Mode) -> Result<TokenStream> {
        Ok(normalize(&self.raw_stream(mode)?))
    }
}

fn describe(u: &StatementUnit<'_>) -> String {
    let text: Vec<&str> = u.terminals().iter().map(|t| t.text()).collect();
    format!("{}-{} `{}`", u.line_start, u.line_end, text.join(" "))
}

/// The single statement unit a line span designates: the unit whose span is
/// exactly `start..=end`, else the only unit inside it, else the only unit
/// overlapping it.
pub fn resolve_unit<'a>(tree: &'a ParseTree, start: u32, end: u32) -> Result<StatementUnit<'a>> {
    let units = parser::statements_of(tree);
    let span = format!("{start}-{end}");
    let pick = |c: Vec<StatementUnit<'a>>| pick_one(&span, c);
    let exact: Vec<_> = units.iter().filter(|u| u.line_start == start && u.line_end == end).cloned().collect();
    if let Some(r) = pick(exact) {
        return r;
    }
    let inside: Vec<_> = units.iter().filter(|u| u.line_start >= start && u.line_end <= end).cloned().collect();
    if let Some(r) = pick(inside) {
        return r;
    }
    let overlapping: Vec<_> = units.iter().filter(|u| u.line_start <= end && u.line_end >= start).cloned().collect();
    pick(overlapping).unwrap_or(Err(Error::Ambiguous { span, candidates: Vec::new() }))
}

fn pick_one<'a>(span: &str, mut c: Vec<StatementUnit<'a>>) -> Option<Result<StatementUnit<'a>>> {
    match c.len() {
        0 => None,
        1 => Some(Ok(c.remove(0))),
        _ => Some(Err(Error::Ambiguous { span: span.to_string(), candidates: c.iter().map(describe).collect() })),
    }
}

fn source_lines(source: &str, start: u32, end: u32) -> String {
    source
        .lines()
        .skip(start.saturating_sub(1) as usize)
        .take((end - start + 1) as usize)
        .map(str::trim)
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BugDb {
    pub records: Vec<BugRecord>,
}

impl BugDb {
    pub fn load(path: &Path) -> Result<Self> {
        let text = artifact::read_to_string(path)?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            records.push(
                serde_json::from_str(line).map_err(|e| Error::format(path, format!("line {}: {e}", i + 1)))?,
            );
        }
        Ok(BugDb { records })
    }

    /// Loads `path`, or starts empty when it does not exist yet.
    pub fn load_or_default(path: &Path) -> Result<Self> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(BugDb::default())
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("bug record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        artifact::write_locked(path, self.to_jsonl().as_bytes())
    }

    pub fn get(&self, bug_id: &str) -> Option<&BugRecord> {
        self.records.iter().find(|r| r.bug_id == bug_id)
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &BugRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    /// Records the statement unit at `start..=end` of `source`. Adding the
    /// same statement again returns the existing record.
    pub fn add_bug(&mut self, source: &str, start: u32, end: u32, category: Category, split: Split) -> Result<BugRecord> {
        if start == 0 || start > end {
            return Err(Error::Config(format!("invalid line span {start}-{end}")));
        }
        let tree = parser::parse(source).map_err(|e| Error::Parse { path: "<bug source>".into(), source: e })?;
        let unit = resolve_unit(&tree, start, end)?;
        let contract_name = unit.contract.identifier().unwrap_or_default().to_string();
        let bug_id = format!("{contract_name}@{}-{}", unit.line_start, unit.line_end);
        let record = BugRecord {
            bug_id: bug_id.clone(),
            category,
            contract_name,
            line_start: unit.line_start,
            line_end: unit.line_end,
            statement_source: source_lines(source, unit.line_start, unit.line_end),
            split,
            model_version: None,
            tokens: serialize_statement(&unit, Mode::Structural, &bug_id)
                .tokens
                .into_iter()
                .map(|t| t.text)
                .collect(),
            context_source: source.to_string(),
        };
        if let Some(existing) = self.get(&bug_id) {
            if existing.context_source == record.context_source && existing.category == category && existing.split == split {
                return Ok(existing.clone());
            }
            return Err(Error::Ingest(format!("bug `{bug_id}` already exists with different content")));
        }
        self.records.push(record.clone());
        Ok(record)
    }

    /// Matrix of the records in `split`, rows sorted by bug_id. Stamps the
    /// model version on every record it embeds.
    pub fn build_matrix(&mut self, model: &EmbeddingModel, split: Split, mode: Mode) -> Result<EmbeddingMatrix> {
        let mut ids: Vec<usize> = (0..self.records.len()).filter(|i| self.records[*i].split == split).collect();
        if ids.is_empty() {
            return Err(Error::Precondition(format!("bug database has no {split} records")));
        }
        ids.sort_by(|a, b| self.records[*a].bug_id.cmp(&self.records[*b].bug_id));
        let mut m = EmbeddingMatrix::new(Level::Statement, mode, model.dim(), model.version());
        let mut composer = Composer::new(model);
        for i in ids {
            let r = &mut self.records[i];
            let v = composer.compose(&r.stream(mode)?.words());
            m.push(r.element_ref(), &v);
            r.model_version = Some(model.version().to_string());
        }
        Ok(m)
    }
}

/// Checks the bug matrix was built from `model`.
pub fn check_version(bugs: &EmbeddingMatrix, model_version: &str) -> Result<()> {
    if bugs.model_version != model_version {
        return Err(Error::Version(format!(
            "bug matrix was built with model {} but model {} is in use; rebuild it",
            bugs.model_version, model_version
        )));
    }
    Ok(())
}
