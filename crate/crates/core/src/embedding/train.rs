//! Skip-gram with negative sampling over subword-augmented inputs.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{EmbeddingModel, TrainConfig};
use super::ngram::bucket_ids;
use crate::error::{Error, Result};

pub(crate) fn initial_input(config: &TrainConfig, vocab: usize) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    initial_input_with(config, vocab, &mut rng)
}

fn initial_input_with(config: &TrainConfig, vocab: usize, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let d = config.dim;
    let bound = 1.0 / d as f32;
    let mut input = vec![0.0f32; (vocab + config.buckets as usize) * d];
    for x in &mut input[..vocab * d] {
        *x = rng.gen_range(-bound..bound);
    }
    input
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

struct Trainer<'a> {
    config: &'a TrainConfig,
    input: Vec<f32>,
    output: Vec<f32>,
    hidden: Vec<f32>,
    grad: Vec<f32>,
}

impl Trainer<'_> {
    fn update(&mut self, components: &[u32], target: u32, negatives: &[u32], lr: f32) {
        let d = self.config.dim;
        self.hidden.iter_mut().for_each(|h| *h = 0.0);
        for &c in components {
            let row = &self.input[c as usize * d..(c as usize + 1) * d];
            self.hidden.iter_mut().zip(row).for_each(|(h, x)| *h += *x);
        }
        self.grad.iter_mut().for_each(|g| *g = 0.0);

        let step = |word: u32, label: f32, this: &mut Self| {
            let out = &mut this.output[word as usize * d..(word as usize + 1) * d];
            let dot: f32 = out.iter().zip(&this.hidden).map(|(a, b)| a * b).sum();
            let alpha = lr * (label - sigmoid(dot));
            for k in 0..d {
                this.grad[k] += alpha * out[k];
                out[k] += alpha * this.hidden[k];
            }
        };
        step(target, 1.0, self);
        for &n in negatives {
            step(n, 0.0, self);
        }
        let share = 1.0 / components.len() as f32;
        for &c in components {
            let row = &mut self.input[c as usize * d..(c as usize + 1) * d];
            row.iter_mut().zip(&self.grad).for_each(|(x, g)| *x += share * *g);
        }
    }
}

/// Trains on tokenized sentences. Single-threaded and bit-reproducible for
/// a fixed config.
pub fn train<S: AsRef<str>>(sentences: &[Vec<S>], config: &TrainConfig) -> Result<EmbeddingModel> {
    config.validate()?;
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in sentences {
        for t in s {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = counts.into_iter().filter(|(_, c)| *c >= config.min_count as u64).collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    if vocab.is_empty() {
        return Err(Error::Training("training corpus has no tokens".into()));
    }
    let index: HashMap<&str, u32> = vocab.iter().enumerate().map(|(i, (t, _))| (*t, i as u32)).collect();
    let v = vocab.len();
    let coded: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| index.get(t.as_ref()).copied()).collect())
        .collect();
    let components: Vec<Vec<u32>> = vocab
        .iter()
        .enumerate()
        .map(|(i, (t, _))| {
            let mut c = vec![i as u32];
            c.extend(
                bucket_ids(t, config.ngram_min, config.ngram_max, config.buckets, config.hash_seed)
                    .into_iter()
                    .map(|b| v as u32 + b),
            );
            c
        })
        .collect();
    let noise = WeightedIndex::new(vocab.iter().map(|(_, c)| (*c as f64).sqrt())).expect("positive counts");

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trainer = Trainer {
        config,
        input: initial_input_with(config, v, &mut rng),
        output: vec![0.0; v * config.dim],
        hidden: vec![0.0; config.dim],
        grad: vec![0.0; config.dim],
    };

    let per_epoch: u64 = coded.iter().map(|s| s.len() as u64).sum();
    let total = (per_epoch * config.epochs as u64).max(1) as f64;
    let mut processed = 0u64;
    let mut order: Vec<usize> = (0..coded.len()).collect();
    let mut negatives = Vec::with_capacity(config.negative);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &s in &order {
            let sent = &coded[s];
            for (i, &w) in sent.iter().enumerate() {
                let progress = processed as f64 / total;
                let lr = config.learning_rate * (1.0 - progress).max(1e-4) as f32;
                let b = rng.gen_range(1..=config.window);
                let lo = i.saturating_sub(b);
                let hi = (i + b).min(sent.len() - 1);
                for c in lo..=hi {
                    if c == i {
                        continue;
                    }
                    let target = sent[c];
                    negatives.clear();
                    for _ in 0..config.negative {
                        let n = noise.sample(&mut rng) as u32;
                        if n != target {
                            negatives.push(n);
                        }
                    }
                    trainer.update(&components[w as usize], target, &negatives, lr);
                }
                processed += 1;
            }
        }
    }
    let tokens = vocab.into_iter().map(|(t, _)| t.to_string()).collect();
    Ok(EmbeddingModel::from_parts(config.clone(), tokens, trainer.input))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TrainConfig {
        TrainConfig { dim: 16, buckets: 2_000, epochs: 2, ..TrainConfig::default() }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let none: Vec<Vec<String>> = vec![vec![]];
        assert!(matches!(train(&none, &cfg()), Err(Error::Training(_))));
    }

    #[test]
    fn single_token_corpus_stays_finite() {
        let s = vec![vec!["tok"; 50]; 20];
        let m = train(&s, &cfg()).unwrap();
        assert_eq!(m.vocab_size(), 1);
        assert!(m.token_vector("tok").iter().all(|x| x.is_finite()));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let s = vec![vec!["a", "bb", "ccc", "bb"], vec!["ccc", "dddd", "a"]];
        let a = train(&s, &cfg()).unwrap();
        let b = train(&s, &cfg()).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        let c = train(&s, &TrainConfig { seed: 7, ..cfg() }).unwrap();
        assert_ne!(a.to_bytes(), c.to_bytes());
    }
}
