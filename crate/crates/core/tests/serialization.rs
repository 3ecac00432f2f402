mod common;

use solsim::parser::{parse, statements_of};
use solsim::tokenizer::{normalize, streams_of, Level, Mode, Token, TokenClass};

fn same_ignoring_case(actual: &str, expected: &str) {
    let a: Vec<String> = actual.split_whitespace().map(str::to_lowercase).collect();
    let e: Vec<String> = expected.split_whitespace().map(str::to_lowercase).collect();
    assert_eq!(a, e);
}

fn line(level: Level, mode: Mode) -> String {
    let tree = parse(common::OVERFLOW).unwrap();
    let streams = streams_of(&tree, "overflow", level, mode);
    assert_eq!(streams.len(), 1);
    streams[0].listing_line()
}

#[test]
fn contract_listing() {
    same_ignoring_case(
        &line(Level::Contract, Mode::Structural),
        "1_10 : pragma solidity ^ versionliteral ; contract Overflow { uint private r = 0 ; function addValue ( uint value ) returns ( bool ) {  r += value ; } }",
    );
}

#[test]
fn function_listing() {
    same_ignoring_case(
        &line(Level::Function, Mode::Structural),
        "6_9 :  function addValue ( uint value ) returns ( bool ) { r += value ; } contract Overflow overflow { }",
    );
}

#[test]
fn statement_listing() {
    same_ignoring_case(
        &line(Level::Statement, Mode::Structural),
        "8_8 : sourceUnit contractDefinition contractPart functionDefinition block statement simpleStatement r += value ; function addValue add value ( uint value ) returns ( bool ) contract Overflow overflow { }",
    );
    assert_eq!(line(Level::Statement, Mode::Basic), "8_8 : r += value ;");
}

#[test]
fn ancestor_prefix_matches_parser_path() {
    let tree = parse(common::OVERFLOW).unwrap();
    let unit = &statements_of(&tree)[0];
    let s = &streams_of(&tree, "x", Level::Statement, Mode::Structural)[0];
    let path: Vec<&str> = unit.ancestors.iter().map(|n| n.kind.name()).collect();
    assert_eq!(&s.words()[..path.len()], &path[..]);
}

fn toks(spec: &[(&str, TokenClass)]) -> Vec<Token> {
    spec.iter().map(|(t, c)| Token::new(*t, *c)).collect()
}

#[test]
fn normalization_examples() {
    use TokenClass::*;
    let tree = parse("contract Holder { uint private r=0; }").unwrap();
    let s = &streams_of(&tree, "x", Level::Contract, Mode::Structural)[0];
    let n = normalize(s);
    same_ignoring_case(&n.joined(), "contract Holder { uint private simplevar = decimalnumber }");

    let stop = solsim::tokenizer::normalize_tokens(&toks(&[("r", Identifier)]));
    assert_eq!(stop, toks(&[("simplevar", Placeholder)]));
    let punct = solsim::tokenizer::normalize_tokens(&toks(&[("uint", Keyword), ("x0", Identifier), (";", Punct)]));
    let words: Vec<_> = punct.iter().map(|t| t.text.as_str()).collect();
    assert_eq!(words, ["uint", "x0", "x", "0"]);
    let camel = solsim::tokenizer::normalize_tokens(&toks(&[("addValue", Identifier)]));
    let words: Vec<_> = camel.iter().map(|t| t.text.as_str()).collect();
    assert_eq!(words, ["addValue", "add", "value"]);
}
