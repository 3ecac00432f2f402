//! Subword token embeddings, element composition and embedding matrices.

mod compose;
mod matrix;
mod model;
pub mod ngram;
mod train;

pub use compose::{compose, CodeVector, Composer};
pub use matrix::{
    build_matrix, corpus_streams, matrix_from_streams, ElementRef, EmbeddingMatrix, MATRIX_FORMAT,
};
pub use model::{EmbeddingModel, TrainConfig, MODEL_FORMAT};
pub use train::train;

use crate::corpus::ParsedCorpus;
use crate::error::Result;
use crate::tokenizer::{Level, Mode};

/// Trains a model on the normalized streams of `parsed` at `level`.
pub fn train_on_corpus(parsed: &ParsedCorpus<'_>, level: Level, mode: Mode, config: &TrainConfig) -> Result<EmbeddingModel> {
    let sentences: Vec<Vec<String>> = corpus_streams(parsed, level, mode)
        .into_iter()
        .map(|s| s.tokens.into_iter().map(|t| t.text).collect())
        .collect();
    train(&sentences, config)
}
