use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ngram::bucket_ids;
use crate::artifact;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "SMEMB v1";

/// Hyperparameters of a training run. Everything the trainer reads lives
/// here, so a model file fully describes how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negative: usize,
    pub learning_rate: f32,
    pub min_count: u32,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub buckets: u32,
    pub hash_seed: u64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 150,
            window: 5,
            epochs: 5,
            negative: 5,
            learning_rate: 0.05,
            min_count: 1,
            ngram_min: 3,
            ngram_max: 6,
            buckets: 200_000,
            hash_seed: 0,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("training config: {what}")));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if self.window == 0 || self.epochs == 0 {
            return bad("window and epochs must be positive");
        }
        if self.buckets == 0 {
            return bad("buckets must be positive");
        }
        if self.ngram_min == 0 || self.ngram_min > self.ngram_max {
            return bad("ngram range must satisfy 1 <= min <= max");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1");
        }
        Ok(())
    }
}

/// Token and n-gram-bucket vectors. Input rows are laid out as the `V` word
/// vectors followed by the `B` bucket vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub config: TrainConfig,
    tokens: Vec<String>,
    vocab: HashMap<String, u32>,
    input: Vec<f32>,
    version: String,
}

impl EmbeddingModel {
    pub(crate) fn from_parts(config: TrainConfig, tokens: Vec<String>, input: Vec<f32>) -> Self {
        assert_eq!(input.len(), (tokens.len() + config.buckets as usize) * config.dim);
        let vocab = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let mut m = EmbeddingModel { config, tokens, vocab, input, version: String::new() };
        let mut h = Sha256::new();
        m.write_to(&mut h).expect("hashing cannot fail");
        m.version = hex16(&h.finalize());
        m
    }

    /// A model over `tokens` before any training step: word vectors drawn
    /// as the trainer would draw them, bucket vectors zero.
    pub fn untrained(config: TrainConfig, tokens: Vec<String>) -> Result<Self> {
        config.validate()?;
        let input = super::train::initial_input(&config, tokens.len());
        Ok(Self::from_parts(config, tokens, input))
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.vocab.get(token).copied()
    }

    /// First 16 hex digits of the SHA-256 of the serialized model.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn word_row(&self, idx: u32) -> &[f32] {
        let d = self.config.dim;
        &self.input[idx as usize * d..(idx as usize + 1) * d]
    }

    pub fn bucket_row(&self, bucket: u32) -> &[f32] {
        let d = self.config.dim;
        let r = self.tokens.len() + bucket as usize;
        &self.input[r * d..(r + 1) * d]
    }

    pub fn buckets_of(&self, token: &str) -> Vec<u32> {
        let c = &self.config;
        bucket_ids(token, c.ngram_min, c.ngram_max, c.buckets, c.hash_seed)
    }

    /// Word vector (when in vocabulary) plus the bucket rows of every
    /// n-gram, summed in f32 left to right from zero.
    pub fn token_vector(&self, token: &str) -> Vec<f32> {
        let mut v = vec![0.0f32; self.config.dim];
        let mut add = |row: &[f32]| v.iter_mut().zip(row).for_each(|(a, b)| *a += *b);
        if let Some(i) = self.index_of(token) {
            add(self.word_row(i));
        }
        for b in self.buckets_of(token) {
            add(self.bucket_row(b));
        }
        v
    }

    fn header(&self) -> String {
        let c = &self.config;
        format!(
            "{MODEL_FORMAT} dim={} vocab={} buckets={} ngrams={}-{} seed={} window={} epochs={} negative={} lr={} min_count={} train_seed={}\n",
            c.dim,
            self.tokens.len(),
            c.buckets,
            c.ngram_min,
            c.ngram_max,
            c.hash_seed,
            c.window,
            c.epochs,
            c.negative,
            c.learning_rate,
            c.min_count,
            c.seed,
        )
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(self.header().as_bytes())?;
        for (i, t) in self.tokens.iter().enumerate() {
            writeln!(w, "{t} {i}")?;
        }
        let mut buf = Vec::with_capacity(self.config.dim * 4);
        for row in self.input.chunks_exact(self.config.dim) {
            buf.clear();
            for x in row {
                buf.extend_from_slice(&x.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.input.len() * 4 + self.tokens.len() * 16 + 256);
        self.write_to(&mut out).expect("writing to memory cannot fail");
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        artifact::write_locked(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&artifact::read(path)?).map_err(|m| match m {
            Error::Format { message, .. } => Error::format(path, message),
            other => other,
        })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: String| Error::format("<model>", m);
        let mut rest = bytes;
        let mut next_line = || -> Result<&str> {
            let nl = rest.iter().position(|b| *b == b'\n').ok_or_else(|| bad("truncated text section".into()))?;
            let line = std::str::from_utf8(&rest[..nl]).map_err(|_| bad("text section is not UTF-8".into()))?;
            rest = &rest[nl + 1..];
            Ok(line)
        };
        let header = next_line()?;
        let fields = parse_header(header, MODEL_FORMAT).map_err(bad)?;
        let get = |k: &str| fields.get(k).ok_or_else(|| bad(format!("header lacks `{k}`")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}` value"))) };
        let (nmin, nmax) = get("ngrams")?
            .split_once('-')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| bad("bad `ngrams` value".into()))?;
        let defaults = TrainConfig::default();
        let opt = |k: &str, d: u64| -> Result<u64> { if fields.contains_key(k) { num(k) } else { Ok(d) } };
        let config = TrainConfig {
            dim: num("dim")? as usize,
            buckets: num("buckets")? as u32,
            ngram_min: nmin,
            ngram_max: nmax,
            hash_seed: num("seed")?,
            window: opt("window", defaults.window as u64)? as usize,
            epochs: opt("epochs", defaults.epochs as u64)? as usize,
            negative: opt("negative", defaults.negative as u64)? as usize,
            learning_rate: match fields.get("lr") {
                Some(v) => v.parse().map_err(|_| bad("bad `lr` value".into()))?,
                None => defaults.learning_rate,
            },
            min_count: opt("min_count", defaults.min_count as u64)? as u32,
            seed: opt("train_seed", defaults.seed)?,
        };
        let v = num("vocab")? as usize;
        let mut tokens = Vec::with_capacity(v);
        for i in 0..v {
            let line = next_line()?;
            let (tok, idx) = line.rsplit_once(' ').ok_or_else(|| bad(format!("bad vocab line {i}")))?;
            if idx.parse::<usize>().ok() != Some(i) {
                return Err(bad(format!("vocab index {idx} out of order at entry {i}")));
            }
            tokens.push(tok.to_string());
        }
        let expected = (v + config.buckets as usize) * config.dim * 4;
        if rest.len() != expected {
            return Err(bad(format!("vector section has {} bytes, expected {expected}", rest.len())));
        }
        let input: Vec<f32> = rest.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        if !input.iter().all(|x| x.is_finite()) {
            return Err(bad("non-finite vector component".into()));
        }
        Ok(Self::from_parts(config, tokens, input))
    }
}

fn hex16(digest: &[u8]) -> String {
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Splits `<magic> k=v k=v ...` into its fields.
pub(crate) fn parse_header(line: &str, magic: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let rest = line
        .strip_prefix(magic)
        .ok_or_else(|| format!("expected a `{magic}` header (incompatible or foreign file)"))?;
    let mut fields = BTreeMap::new();
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("malformed header field `{kv}`"))?;
        fields.insert(k.to_string(), v.to_string());
    }
    Ok(fields)
}
