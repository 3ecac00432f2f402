//! Structural code embeddings for Solidity: parsing, leveled token
//! streams, subword embeddings, similarity search and the detectors built
//! on top of them.

pub mod analysis;
pub mod artifact;
pub mod bugdb;
pub mod corpus;
pub mod embedding;
mod error;
pub mod parser;
pub mod simindex;
pub mod tokenizer;

pub use error::{Error, ErrorKind, Result};
