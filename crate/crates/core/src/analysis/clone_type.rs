use std::collections::HashMap;

use super::{CloneType, Finding, FindingKind};
use crate::bugdb::{resolve_unit, BugDb};
use crate::error::{Error, Result};
use crate::parser::{self, ParseTree, StatementUnit};
use crate::parser::lexer::keywords::is_elementary_type;
use crate::tokenizer::{serialize_statement, terminal_token, Level, Mode, Token, TokenClass};

/// Edit similarity at or above which differing fragments grade III_IV.
pub const DEFAULT_EDIT_CUTOFF: f64 = 0.5;

/// `1 - levenshtein / max_len` over token texts; two empty streams score 1.
pub fn edit_similarity(a: &[&str], b: &[&str]) -> f64 {
    let (a, b) = (a.to_vec(), b.to_vec());
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::generic_levenshtein(&a, &b) as f64 / longest as f64
}

fn abstracted(tokens: &[Token]) -> Vec<&str> {
    tokens
        .iter()
        .filter_map(|t| match t.class {
            TokenClass::Identifier => Some("<id>"),
            TokenClass::DecimalNumber
            | TokenClass::HexNumber
            | TokenClass::HexLiteral
            | TokenClass::StringLiteral
            | TokenClass::Placeholder => Some("<lit>"),
            TokenClass::Keyword if is_elementary_type(&t.text) => Some("<type>"),
            // Name parts only restate an identifier.
            TokenClass::NamePart => None,
            _ => Some(t.text.as_str()),
        })
        .collect()
}

/// Grades two raw (unnormalized) token streams.
pub fn classify_clone_type(a: &[Token], b: &[Token], cutoff: f64) -> CloneType {
    let ta: Vec<&str> = a.iter().map(|t| t.text.as_str()).collect();
    let tb: Vec<&str> = b.iter().map(|t| t.text.as_str()).collect();
    if ta == tb {
        CloneType::I
    } else if abstracted(a) == abstracted(b) {
        CloneType::II
    } else if edit_similarity(&ta, &tb) >= cutoff {
        CloneType::IiiIv
    } else {
        CloneType::NotClone
    }
}

/// The statement's own tokens, without structural context.
pub fn unit_tokens(unit: &StatementUnit<'_>) -> Vec<Token> {
    serialize_statement(unit, Mode::Basic, "").tokens
}

/// Every terminal lying wholly within lines `start..=end`, in source order.
pub fn span_tokens(tree: &ParseTree, start: u32, end: u32) -> Vec<Token> {
    tree.root
        .terminals()
        .into_iter()
        .filter(|t| t.line_start >= start && t.line_end <= end)
        .map(terminal_token)
        .collect()
}

fn element_tokens(tree: &ParseTree, level: Level, start: u32, end: u32) -> Result<Vec<Token>> {
    match level {
        Level::Statement => Ok(unit_tokens(&resolve_unit(tree, start, end)?)),
        Level::Contract | Level::Function => Ok(span_tokens(tree, start, end)),
    }
}

/// Fills in `clone_type` on every finding. `trees` maps contract ids of
/// queried elements (and clone partners) to their parse trees; bug
/// findings look their match up in `db`.
pub fn annotate_clone_types(
    findings: &mut [Finding],
    trees: &HashMap<&str, &ParseTree>,
    db: Option<&BugDb>,
    level: Level,
    cutoff: f64,
) -> Result<()> {
    let tree_of = |id: &str| {
        trees
            .get(id)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("no parse tree for contract `{id}`")))
    };
    let mut bug_tokens: HashMap<String, Vec<Token>> = HashMap::new();
    for f in findings.iter_mut() {
        let q = element_tokens(tree_of(&f.query.contract_id)?, level, f.query.line_start, f.query.line_end)?;
        let m = match f.kind {
            FindingKind::Clone => {
                element_tokens(tree_of(&f.matched.contract_id)?, level, f.matched.line_start, f.matched.line_end)?
            }
            FindingKind::Bug | FindingKind::Validation => {
                let id = &f.matched.contract_id;
                if !bug_tokens.contains_key(id) {
                    let rec = db
                        .and_then(|db| db.get(id))
                        .ok_or_else(|| Error::Precondition(format!("bug `{id}` is not in the bug database")))?;
                    let tree = parser::parse(&rec.context_source)
                        .map_err(|e| Error::Parse { path: format!("<bug {id}>").into(), source: e })?;
                    let unit = resolve_unit(&tree, rec.line_start, rec.line_end)?;
                    bug_tokens.insert(id.clone(), unit_tokens(&unit));
                }
                bug_tokens[id].clone()
            }
        };
        f.clone_type = Some(classify_clone_type(&q, &m, cutoff));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bugdb::exemplars::*;
    use crate::parser::parse;

    fn line_tokens(src: &str, line: u32) -> Vec<Token> {
        let t = parse(src).unwrap();
        unit_tokens(&resolve_unit(&t, line, line).unwrap())
    }

    #[test]
    fn identical_is_type_one() {
        let a = line_tokens(RUBIXI, 5);
        assert_eq!(classify_clone_type(&a, &a, DEFAULT_EDIT_CUTOFF), CloneType::I);
    }

    #[test]
    fn renamed_minting_line_is_type_two() {
        let a = line_tokens(ETH_LEND_TOKEN, ETH_LEND_LINE);
        let b = line_tokens(UHUB_TOKEN, UHUB_LINE);
        assert_eq!(classify_clone_type(&a, &b, DEFAULT_EDIT_CUTOFF), CloneType::II);
    }

    #[test]
    fn edited_block_is_type_three() {
        let a = span_tokens(&parse(PRIVATE_BANK).unwrap(), PRIVATE_BANK_BLOCK.0, PRIVATE_BANK_BLOCK.1);
        let b = span_tokens(&parse(ETH_FUND).unwrap(), ETH_FUND_BLOCK.0, ETH_FUND_BLOCK.1);
        assert!(a.len() > 20 && b.len() > a.len());
        assert_eq!(classify_clone_type(&a, &b, DEFAULT_EDIT_CUTOFF), CloneType::IiiIv);
    }

    #[test]
    fn unrelated_is_not_a_clone() {
        let a = line_tokens(RUBIXI, 5);
        let b = line_tokens(WMC_TOKEN, 9);
        assert_eq!(classify_clone_type(&a, &b, DEFAULT_EDIT_CUTOFF), CloneType::NotClone);
    }

    #[test]
    fn edit_similarity_bounds() {
        assert_eq!(edit_similarity(&[], &[]), 1.0);
        assert_eq!(edit_similarity(&["a"], &[]), 0.0);
        assert_eq!(edit_similarity(&["a", "b", "c", "d"], &["a", "x", "c", "d"]), 0.75);
    }
}
