//! Local corpus ingestion from a JSONL manifest.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::artifact;
use crate::error::{Error, Result};
use crate::parser::{self, ParseError, ParseTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub contract_id: String,
    pub source_path: PathBuf,
    pub creator_address: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractRecord {
    pub contract_id: String,
    pub source_path: PathBuf,
    pub creator_address: Option<String>,
    pub source_text: String,
    pub line_count: u32,
}

impl ContractRecord {
    pub fn new(contract_id: impl Into<String>, source_text: impl Into<String>) -> Self {
        let source_text = source_text.into();
        ContractRecord {
            contract_id: contract_id.into(),
            source_path: PathBuf::new(),
            creator_address: None,
            line_count: line_count(&source_text),
            source_text,
        }
    }

    pub fn with_creator(mut self, creator: impl Into<String>) -> Self {
        self.creator_address = Some(creator.into());
        self
    }
}

pub fn line_count(text: &str) -> u32 {
    text.lines().count().max(1) as u32
}

pub fn is_creator_address(s: &str) -> bool {
    s.len() == 42 && s.starts_with("0x") && s[2..].bytes().all(|b| b.is_ascii_hexdigit())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<ContractRecord>,
}

impl Corpus {
    pub fn from_records(records: Vec<ContractRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.contract_id.as_str()) {
                return Err(Error::Ingest(format!("duplicate contract_id `{}`", r.contract_id)));
            }
            if let Some(c) = &r.creator_address {
                if !is_creator_address(c) {
                    return Err(Error::Ingest(format!(
                        "contract `{}`: creator_address `{c}` is not 0x followed by 40 hex digits",
                        r.contract_id
                    )));
                }
            }
        }
        Ok(Corpus { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn parse(&self) -> ParsedCorpus<'_> {
        ParsedCorpus {
            corpus: self,
            trees: self.records.iter().map(|r| parser::parse(&r.source_text)).collect(),
        }
    }
}

/// Reads a manifest. Source paths are relative to the manifest's directory.
pub fn load_corpus(manifest_path: &Path) -> Result<Corpus> {
    let text = artifact::read_to_string(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new(""));
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: ManifestRow = serde_json::from_str(line)
            .map_err(|e| Error::format(manifest_path, format!("line {}: {e}", i + 1)))?;
        let path = base.join(&row.source_path);
        let bytes = std::fs::read(&path)
            .map_err(|e| Error::Ingest(format!("cannot read source `{}`: {e}", path.display())))?;
        let source_text = String::from_utf8(bytes).map_err(|e| {
            Error::Ingest(format!(
                "source `{}` is not valid UTF-8 at byte offset {}",
                path.display(),
                e.utf8_error().valid_up_to()
            ))
        })?;
        records.push(ContractRecord {
            contract_id: row.contract_id,
            source_path: row.source_path,
            creator_address: row.creator_address,
            line_count: line_count(&source_text),
            source_text,
        });
    }
    Corpus::from_records(records)
}

/// Copies every source of `manifest` into `out/src/` and writes
/// `out/manifest.jsonl` pointing at the copies.
pub fn ingest(manifest: &Path, out: &Path) -> Result<Corpus> {
    let corpus = load_corpus(manifest)?;
    let mut rows = String::new();
    let mut records = Vec::with_capacity(corpus.len());
    for (n, r) in corpus.records.iter().enumerate() {
        let rel = PathBuf::from("src").join(format!("{n}.sol"));
        artifact::write_locked(&out.join(&rel), r.source_text.as_bytes())?;
        let row = ManifestRow {
            contract_id: r.contract_id.clone(),
            source_path: rel.clone(),
            creator_address: r.creator_address.clone(),
        };
        rows.push_str(&serde_json::to_string(&row).expect("manifest row serializes"));
        rows.push('\n');
        records.push(ContractRecord { source_path: rel, ..r.clone() });
    }
    artifact::write_locked(&out.join("manifest.jsonl"), rows.as_bytes())?;
    Ok(Corpus { records })
}

/// A corpus with every record parsed. Records that fail to parse stay in
/// the corpus and are flagged; they contribute no elements downstream.
pub struct ParsedCorpus<'a> {
    pub corpus: &'a Corpus,
    pub trees: Vec<Result<ParseTree, ParseError>>,
}

impl<'a> ParsedCorpus<'a> {
    /// Successfully parsed records with their trees.
    pub fn parsed(&self) -> impl Iterator<Item = (&'a ContractRecord, &ParseTree)> {
        self.corpus.records.iter().zip(&self.trees).filter_map(|(r, t)| t.as_ref().ok().map(|t| (r, t)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'a ContractRecord, &ParseError)> {
        self.corpus.records.iter().zip(&self.trees).filter_map(|(r, t)| t.as_ref().err().map(|e| (r, e)))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub n_contracts: u64,
    pub n_individual_contracts: u64,
    pub n_functions: u64,
    pub n_statements: u64,
    pub n_lines: u64,
}

impl std::ops::Add for CorpusStats {
    type Output = CorpusStats;

    fn add(self, o: CorpusStats) -> CorpusStats {
        CorpusStats {
            n_contracts: self.n_contracts + o.n_contracts,
            n_individual_contracts: self.n_individual_contracts + o.n_individual_contracts,
            n_functions: self.n_functions + o.n_functions,
            n_statements: self.n_statements + o.n_statements,
            n_lines: self.n_lines + o.n_lines,
        }
    }
}

/// Libraries and interfaces count as individual contracts.
pub fn corpus_stats(parsed: &ParsedCorpus<'_>) -> CorpusStats {
    let mut s = CorpusStats {
        n_contracts: parsed.corpus.len() as u64,
        n_lines: parsed.corpus.records.iter().map(|r| r.line_count as u64).sum(),
        ..CorpusStats::default()
    };
    for (_, tree) in parsed.parsed() {
        s.n_individual_contracts += parser::contracts_of(tree).len() as u64;
        s.n_functions += parser::functions_of(tree).len() as u64;
        s.n_statements += parser::statements_of(tree).len() as u64;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn creator_format() {
        assert!(is_creator_address("0x0123456789abcdefABCDEF0123456789abcdef01"));
        assert!(!is_creator_address("0x123"));
        assert!(!is_creator_address("1x0123456789abcdefABCDEF0123456789abcdef01"));
    }

    #[test]
    fn line_counting() {
        assert_eq!(line_count("a\nb\n"), 2);
        assert_eq!(line_count("a\nb"), 2);
        assert_eq!(line_count(""), 1);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let recs = vec![ContractRecord::new("a", "x"), ContractRecord::new("b", "y"), ContractRecord::new("a", "z")];
        let err = Corpus::from_records(recs).unwrap_err();
        assert!(err.to_string().contains("`a`"));
    }
}
