use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{sort_findings, Finding, FindingKind};
use crate::corpus::{Corpus, ParsedCorpus};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::simindex::threshold_scan;
use crate::tokenizer::Level;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CloneOptions {
    /// Drop pairs whose two contracts share a creator address.
    pub exclude_same_creator: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloneStats {
    pub level: Level,
    pub pairs: usize,
    pub cloned_lines: u64,
    pub total_lines: u64,
    pub clone_ratio: f64,
}

/// Total length of the union of inclusive line intervals.
fn union_len(spans: &mut [(u32, u32)]) -> u64 {
    spans.sort_unstable();
    let mut total = 0u64;
    let mut current: Option<(u32, u32)> = None;
    for &(s, e) in spans.iter() {
        match current {
            Some((cs, ce)) if s <= ce.saturating_add(1) => current = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += (ce - cs + 1) as u64;
                current = Some((s, e));
            }
            None => current = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = current {
        total += (ce - cs + 1) as u64;
    }
    total
}

/// Unordered element pairs of `matrix` clearing `delta`, with line-union
/// statistics over the parsed records of `parsed`.
pub fn detect_clones(
    matrix: &EmbeddingMatrix,
    parsed: &ParsedCorpus<'_>,
    delta: f64,
    options: CloneOptions,
) -> Result<(Vec<Finding>, CloneStats)> {
    let records: HashMap<&str, _> = parsed.parsed().map(|(r, _)| (r.contract_id.as_str(), r)).collect();
    if let Some(e) = matrix.index.iter().find(|e| !records.contains_key(e.contract_id.as_str())) {
        return Err(Error::Precondition(format!(
            "matrix row {e} refers to a contract that is not in the corpus; re-embed the corpus"
        )));
    }
    let creators: Vec<Option<&str>> = if options.exclude_same_creator {
        if let Some(r) = parsed.corpus.records.iter().find(|r| r.creator_address.is_none()) {
            return Err(Error::Config(format!(
                "creator exclusion needs creator addresses, but `{}` has none",
                r.contract_id
            )));
        }
        matrix.index.iter().map(|e| records[e.contract_id.as_str()].creator_address.as_deref()).collect()
    } else {
        vec![None; matrix.len()]
    };
    let pairs = threshold_scan(matrix, matrix, delta, |i, j| {
        j <= i || (options.exclude_same_creator && creators[i] == creators[j])
    })?;

    let mut spans: BTreeMap<&str, BTreeSet<(u32, u32)>> = BTreeMap::new();
    for p in &pairs {
        for e in [&p.query, &p.target] {
            spans.entry(e.contract_id.as_str()).or_default().insert((e.line_start, e.line_end));
        }
    }
    let cloned_lines = spans
        .values()
        .map(|s| union_len(&mut s.iter().copied().collect::<Vec<_>>()))
        .sum();
    let total_lines: u64 = records.values().map(|r| r.line_count as u64).sum();
    let stats = CloneStats {
        level: matrix.level,
        pairs: pairs.len(),
        cloned_lines,
        total_lines,
        clone_ratio: if total_lines == 0 { 0.0 } else { cloned_lines as f64 / total_lines as f64 },
    };
    let mut findings: Vec<Finding> = pairs
        .into_iter()
        .map(|p| Finding {
            kind: FindingKind::Clone,
            query: p.query,
            matched: p.target,
            score: p.score,
            category: None,
            clone_type: None,
        })
        .collect();
    sort_findings(&mut findings);
    Ok((findings, stats))
}

/// `n` records drawn without replacement, kept in corpus order. Asking
/// for more records than exist returns the whole corpus.
pub fn sample_contracts(corpus: &Corpus, n: usize, seed: u64) -> Corpus {
    let total = corpus.records.len();
    if n >= total {
        return corpus.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, total, n).into_vec();
    picked.sort_unstable();
    Corpus { records: picked.into_iter().map(|i| corpus.records[i].clone()).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ContractRecord;

    #[test]
    fn interval_union() {
        assert_eq!(union_len(&mut []), 0);
        assert_eq!(union_len(&mut [(1, 3), (2, 5), (8, 8)]), 6);
        assert_eq!(union_len(&mut [(4, 4), (5, 6)]), 3);
    }

    #[test]
    fn sampling_is_seeded() {
        let recs = (0..20).map(|i| ContractRecord::new(format!("c{i:02}"), "contract A {}")).collect();
        let c = Corpus::from_records(recs).unwrap();
        let a = sample_contracts(&c, 5, 3);
        assert_eq!(a.records.len(), 5);
        assert_eq!(a, sample_contracts(&c, 5, 3));
        assert_ne!(a, sample_contracts(&c, 5, 4));
        assert!(a.records.windows(2).all(|w| w[0].contract_id < w[1].contract_id));
        assert_eq!(sample_contracts(&c, 50, 3).records.len(), 20);
    }
}
