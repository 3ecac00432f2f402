//! Normalized-Euclidean similarity and threshold queries over matrices.

use std::cmp::Ordering;

use crate::embedding::{ElementRef, EmbeddingMatrix};
use crate::error::{Error, Result};

/// Scores within this distance of 1 count as exact matches.
pub const EPSILON: f64 = 1e-9;

/// `1 - |a-b| / (|a|+|b|)`, computed in f64. Two zero vectors score 1.
pub fn similarity(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "similarity of vectors with different dimensions");
    let (mut na, mut nb, mut nd) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        na += x * x;
        nb += y * y;
        let d = x - y;
        nd += d * d;
    }
    let denom = na.sqrt() + nb.sqrt();
    if denom == 0.0 {
        return 1.0;
    }
    (1.0 - nd.sqrt() / denom).clamp(0.0, 1.0)
}

/// Same as [`similarity`] on f32 rows, widened component by component.
pub fn similarity_f32(a: &[f32], b: &[f32]) -> f64 {
    assert_eq!(a.len(), b.len(), "similarity of vectors with different dimensions");
    let (mut na, mut nb, mut nd) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (*x as f64, *y as f64);
        na += x * x;
        nb += y * y;
        let d = x - y;
        nd += d * d;
    }
    let denom = na.sqrt() + nb.sqrt();
    if denom == 0.0 {
        return 1.0;
    }
    (1.0 - nd.sqrt() / denom).clamp(0.0, 1.0)
}

pub fn check_threshold(delta: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&delta) {
        Ok(delta)
    } else {
        Err(Error::Config(format!("threshold {delta} is outside [0, 1]")))
    }
}

/// Whether `score` clears `delta`. The comparison is strict, except that a
/// threshold within [`EPSILON`] of 1 accepts scores within [`EPSILON`] of 1,
/// since nothing can score strictly above 1.
pub fn passes(score: f64, delta: f64) -> bool {
    if delta >= 1.0 - EPSILON {
        score >= 1.0 - EPSILON
    } else {
        score > delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    pub queries: Vec<ElementRef>,
    pub targets: Vec<ElementRef>,
    /// Row-major `queries.len() x targets.len()` scores.
    pub scores: Vec<f64>,
}

impl PairMatrix {
    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.targets.len() + j]
    }

    /// A pair of an element with itself.
    pub fn is_self(&self, i: usize, j: usize) -> bool {
        self.queries[i] == self.targets[j]
    }
}

fn check_dims(q: &EmbeddingMatrix, t: &EmbeddingMatrix) {
    assert_eq!(q.dim, t.dim, "matrices have different dimensions");
}

pub fn pairwise(queries: &EmbeddingMatrix, targets: &EmbeddingMatrix) -> PairMatrix {
    check_dims(queries, targets);
    let mut scores = Vec::with_capacity(queries.len() * targets.len());
    for i in 0..queries.len() {
        for j in 0..targets.len() {
            scores.push(similarity_f32(queries.row(i), targets.row(j)));
        }
    }
    PairMatrix { queries: queries.index.clone(), targets: targets.index.clone(), scores }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub query: ElementRef,
    pub target: ElementRef,
    pub score: f64,
}

fn order_pairs(pairs: &mut [ScoredPair]) {
    pairs.sort_by(|a, b| {
        a.query
            .cmp(&b.query)
            .then(b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal))
            .then(a.target.cmp(&b.target))
    });
}

/// Non-self pairs of `m` clearing `delta`, ordered by query, then
/// descending score, then target.
pub fn threshold_pairs(m: &PairMatrix, delta: f64) -> Result<Vec<ScoredPair>> {
    check_threshold(delta)?;
    let mut out = Vec::new();
    for i in 0..m.queries.len() {
        for j in 0..m.targets.len() {
            let s = m.score(i, j);
            if !m.is_self(i, j) && passes(s, delta) {
                out.push(ScoredPair { query: m.queries[i].clone(), target: m.targets[j].clone(), score: s });
            }
        }
    }
    order_pairs(&mut out);
    Ok(out)
}

/// [`threshold_pairs`] without materializing the score matrix. `skip`
/// can veto index pairs before they are scored.
pub fn threshold_scan(
    queries: &EmbeddingMatrix,
    targets: &EmbeddingMatrix,
    delta: f64,
    mut skip: impl FnMut(usize, usize) -> bool,
) -> Result<Vec<ScoredPair>> {
    check_threshold(delta)?;
    check_dims(queries, targets);
    let mut out = Vec::new();
    for i in 0..queries.len() {
        for j in 0..targets.len() {
            if queries.index[i] == targets.index[j] || skip(i, j) {
                continue;
            }
            let s = similarity_f32(queries.row(i), targets.row(j));
            if passes(s, delta) {
                out.push(ScoredPair { query: queries.index[i].clone(), target: targets.index[j].clone(), score: s });
            }
        }
    }
    order_pairs(&mut out);
    Ok(out)
}

/// Best-scoring target for `row`; ties go to the lowest index.
pub fn nearest(row: &[f32], targets: &EmbeddingMatrix) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..targets.len() {
        let s = similarity_f32(row, targets.row(j));
        if best.map_or(true, |(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{Level, Mode};

    #[test]
    fn hand_case() {
        let mut a = vec![0.0; 150];
        let mut b = vec![0.0; 150];
        a[0] = 3.0;
        b[1] = 4.0;
        assert!((similarity(&a, &b) - 2.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vectors() {
        let z = [0.0; 4];
        assert_eq!(similarity(&z, &z), 1.0);
        assert_eq!(similarity(&z, &[1.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn threshold_rule() {
        assert!(passes(1.0, 1.0));
        assert!(!passes(0.95, 0.95));
        assert!(passes(0.9500001, 0.95));
        assert!(passes(0.5, 0.0));
        assert!(check_threshold(1.5).is_err());
        assert!(check_threshold(-0.1).is_err());
    }

    #[test]
    fn single_self_pair() {
        let mut m = EmbeddingMatrix::new(Level::Contract, Mode::Structural, 2, "v");
        m.push_row(ElementRef::new("a", 1, 3), &[1.0, 2.0]);
        let p = pairwise(&m, &m);
        assert_eq!(p.scores, [1.0]);
        assert!(p.is_self(0, 0));
        assert!(threshold_pairs(&p, 0.0).unwrap().is_empty());
    }
}
