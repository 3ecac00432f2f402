use crate::parser::{contracts_of, functions_with_contract, ParseNode, ParseTree, Rule, StatementUnit, Term};

use super::normalize::split_name;
use super::{Level, Mode, Token, TokenClass, TokenStream, TokenizeError};

fn class_of(term: Term) -> TokenClass {
    match term {
        Term::Keyword(_) => TokenClass::Keyword,
        Term::Identifier => TokenClass::Identifier,
        Term::DecimalNumber => TokenClass::DecimalNumber,
        Term::HexNumber => TokenClass::HexNumber,
        Term::HexLiteral => TokenClass::HexLiteral,
        Term::StringLiteral => TokenClass::StringLiteral,
        Term::VersionLiteral => TokenClass::VersionLiteral,
        Term::Punct(_) => TokenClass::Punct,
    }
}

/// Token for a terminal node as serialization emits it.
pub fn terminal_token(node: &ParseNode) -> Token {
    let term = node.term().expect("terminal node");
    // Version numbers carry no information worth a vocabulary entry.
    let text = if term == Term::VersionLiteral { "versionliteral" } else { node.text() };
    Token::new(text, class_of(term))
}

fn tokens_of<'a>(nodes: impl IntoIterator<Item = &'a ParseNode>) -> Vec<Token> {
    nodes.into_iter().map(terminal_token).collect()
}

fn name_parts(name: &str) -> impl Iterator<Item = Token> {
    split_name(name).into_iter().map(|p| Token::new(p, TokenClass::NamePart))
}

/// `contract <Name> <name parts> { }`
pub fn contract_signature(contract: &ParseNode) -> Vec<Token> {
    let mut out = Vec::new();
    if let Some(kw) = contract
        .children
        .iter()
        .find(|c| c.is_keyword("contract") || c.is_keyword("library") || c.is_keyword("interface"))
    {
        out.push(terminal_token(kw));
    }
    if let Some(name) = contract.identifier() {
        out.push(Token::new(name, TokenClass::Identifier));
        out.extend(name_parts(name));
    }
    out.push(Token::new("{", TokenClass::Punct));
    out.push(Token::new("}", TokenClass::Punct));
    out
}

/// Function header without its body, with the name's parts after the name.
pub fn function_signature(func: &ParseNode) -> Vec<Token> {
    let mut out = Vec::new();
    let mut named = false;
    for c in &func.children {
        if c.is_rule(Rule::Block) || c.term() == Some(Term::Punct(";")) {
            continue;
        }
        if !named && c.term() == Some(Term::Identifier) {
            named = true;
            out.push(terminal_token(c));
            out.extend(name_parts(c.text()));
            continue;
        }
        out.extend(tokens_of(c.terminals()));
    }
    out
}

/// Contract-level stream. The file's pragma directives are prepended to
/// the first contract of the file.
pub fn serialize_contract(tree: &ParseTree, contract: &ParseNode, contract_id: &str) -> TokenStream {
    let first = contracts_of(tree).first().is_some_and(|c| std::ptr::eq(*c, contract));
    let mut tokens = Vec::new();
    let mut line_start = contract.line_start;
    if first {
        for p in tree.root.children.iter().take_while(|c| !std::ptr::eq(*c, contract)) {
            if p.is_rule(Rule::PragmaDirective) {
                line_start = line_start.min(p.line_start);
                tokens.extend(tokens_of(p.terminals()));
            }
        }
    }
    tokens.extend(tokens_of(contract.terminals()));
    TokenStream {
        level: Level::Contract,
        mode: Mode::Structural,
        contract_id: contract_id.to_string(),
        line_start,
        line_end: contract.line_end,
        tokens,
    }
}

pub(super) fn function_stream(func: &ParseNode, contract: &ParseNode, contract_id: &str) -> TokenStream {
    let mut tokens = tokens_of(func.terminals());
    tokens.extend(contract_signature(contract));
    TokenStream {
        level: Level::Function,
        mode: Mode::Structural,
        contract_id: contract_id.to_string(),
        line_start: func.line_start,
        line_end: func.line_end,
        tokens,
    }
}

/// Function-level stream: the function's tokens, then its contract's signature.
pub fn serialize_function(tree: &ParseTree, func: &ParseNode, contract_id: &str) -> Result<TokenStream, TokenizeError> {
    let (_, contract) = functions_with_contract(tree)
        .into_iter()
        .find(|(f, _)| std::ptr::eq(*f, func))
        .ok_or(TokenizeError::OrphanFunction { line: func.line_start })?;
    Ok(function_stream(func, contract, contract_id))
}

/// Statement-level stream. Structural mode wraps the statement in its
/// ancestor chain and the enclosing function and contract signatures.
pub fn serialize_statement(unit: &StatementUnit<'_>, mode: Mode, contract_id: &str) -> TokenStream {
    let own = tokens_of(unit.terminals());
    let tokens = match mode {
        Mode::Basic => own,
        Mode::Structural => {
            let mut t: Vec<Token> =
                unit.ancestors.iter().map(|n| Token::new(n.kind.name(), TokenClass::NodeKind)).collect();
            t.extend(own);
            t.extend(function_signature(unit.function));
            t.extend(contract_signature(unit.contract));
            t
        }
    };
    TokenStream {
        level: Level::Statement,
        mode,
        contract_id: contract_id.to_string(),
        line_start: unit.line_start,
        line_end: unit.line_end,
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, statements_of};
    use crate::tokenizer::streams_of;

    const LISTING: &str = "pragma solidity ^0.4.15;\n\ncontract Overflow {\n    uint private r=0;\n\n    function addValue(uint value) returns (bool){\n        // possible overflow\n        r += value;\n    }\n}\n";

    #[test]
    fn trivial_contract() {
        let t = parse("contract A { }").unwrap();
        let s = streams_of(&t, "x", Level::Contract, Mode::Structural);
        assert_eq!(s[0].listing_line(), "1_1 : contract A { }");
    }

    #[test]
    fn parameterless_function() {
        let t = parse("contract C { function f() {} }").unwrap();
        let s = streams_of(&t, "x", Level::Function, Mode::Structural);
        assert_eq!(s[0].joined(), "function f ( ) { } contract C c { }");
    }

    #[test]
    fn two_contracts_have_disjoint_keys() {
        let t = parse("pragma solidity ^0.4.0;\ncontract A {\n}\ncontract B {\n uint x;\n}").unwrap();
        let s = streams_of(&t, "x", Level::Contract, Mode::Structural);
        let lines: Vec<_> = s.iter().map(|s| s.listing_line()).collect();
        assert_eq!(
            lines,
            ["1_3 : pragma solidity ^ versionliteral ; contract A { }", "4_6 : contract B { uint x ; }"]
        );
    }

    #[test]
    fn same_function_in_two_contracts_differs_by_signature() {
        let t = parse("contract A { function f() { g(); } }\ncontract Bb { function f() { g(); } }").unwrap();
        let s = streams_of(&t, "x", Level::Function, Mode::Structural);
        let a = s[0].words();
        let b = s[1].words();
        assert_eq!(a[..a.len() - 5], b[..b.len() - 5]);
        assert_eq!(a[a.len() - 5..], ["contract", "A", "a", "{", "}"]);
        assert_eq!(b[b.len() - 5..], ["contract", "Bb", "bb", "{", "}"]);
    }

    #[test]
    fn statement_modes() {
        let t = parse(LISTING).unwrap();
        let units = statements_of(&t);
        assert_eq!(serialize_statement(&units[0], Mode::Basic, "x").joined(), "r += value ;");
    }

    #[test]
    fn statement_free_contract_has_no_statements() {
        let t = parse("contract A { uint x; function f(); }").unwrap();
        assert!(streams_of(&t, "x", Level::Statement, Mode::Structural).is_empty());
    }
}
