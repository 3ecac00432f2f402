//! Serialization of parse trees into leveled token streams, and their
//! normalization.

mod normalize;
mod serialize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::parser::{functions_with_contract, statements_of, ParseTree};

pub use normalize::{normalize, normalize_tokens, split_name};
pub use serialize::{
    contract_signature, function_signature, serialize_contract, serialize_function, serialize_statement, terminal_token,
};

/// Granularity of a code element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Contract,
    Function,
    Statement,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Contract, Level::Function, Level::Statement];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Contract => "contract",
            Level::Function => "function",
            Level::Statement => "statement",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contract" => Ok(Level::Contract),
            "function" => Ok(Level::Function),
            "statement" => Ok(Level::Statement),
            _ => Err(format!("unknown level `{s}` (expected contract, function or statement)")),
        }
    }
}

/// Whether statement streams carry structural context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Structural,
    Basic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Structural => "structural",
            Mode::Basic => "basic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "structural" => Ok(Mode::Structural),
            "basic" => Ok(Mode::Basic),
            _ => Err(format!("unknown mode `{s}` (expected structural or basic)")),
        }
    }
}

/// Where a token came from. Normalization dispatches on this, never on text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Keyword,
    Identifier,
    DecimalNumber,
    HexNumber,
    HexLiteral,
    StringLiteral,
    VersionLiteral,
    Punct,
    /// Ancestor node-kind name in a structural prefix.
    NodeKind,
    /// Lowercased constituent of a split identifier.
    NamePart,
    /// Output of literal or single-character unification.
    Placeholder,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub class: TokenClass,
}

impl Token {
    pub fn new(text: impl Into<String>, class: TokenClass) -> Self {
        Token { text: text.into(), class }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub level: Level,
    pub mode: Mode,
    pub contract_id: String,
    pub line_start: u32,
    pub line_end: u32,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    /// `lineStart_lineEnd`.
    pub fn element_key(&self) -> String {
        format!("{}_{}", self.line_start, self.line_end)
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn joined(&self) -> String {
        self.words().join(" ")
    }

    /// `<key> : <tokens...>`
    pub fn listing_line(&self) -> String {
        format!("{} : {}", self.element_key(), self.joined())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenizeError {
    #[error("function at line {line} has no enclosing contract")]
    OrphanFunction { line: u32 },
}

/// All raw (unnormalized) streams of one file at `level`, in source order.
/// `mode` only affects statement streams.
pub fn streams_of(tree: &ParseTree, contract_id: &str, level: Level, mode: Mode) -> Vec<TokenStream> {
    match level {
        Level::Contract => crate::parser::contracts_of(tree)
            .into_iter()
            .map(|c| serialize_contract(tree, c, contract_id))
            .collect(),
        Level::Function => functions_with_contract(tree)
            .into_iter()
            .map(|(f, c)| serialize::function_stream(f, c, contract_id))
            .collect(),
        Level::Statement => statements_of(tree)
            .iter()
            .map(|u| serialize_statement(u, mode, contract_id))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_and_mode_parse() {
        for l in Level::ALL {
            assert_eq!(l.as_str().parse::<Level>().unwrap(), l);
        }
        assert_eq!("basic".parse::<Mode>().unwrap(), Mode::Basic);
        assert!("file".parse::<Level>().is_err());
    }
}
