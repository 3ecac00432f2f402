//! Lexing and parsing of a Solidity subset into a typed parse tree.

mod grammar;
pub mod lexer;
pub mod tree;
pub mod xml;

use std::fmt::Write as _;

pub use tree::{node_catalog, NodeCatalog, NodeKind, ParseNode, ParseTree, Rule, Term};
pub use xml::{export_xml, import_xml};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: found {found}{}", expected_suffix(.expected))]
    Syntax { line: u32, column: u32, found: String, expected: Vec<String> },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported { line: u32, column: u32, construct: String },
    #[error("malformed parse-tree XML: {0}")]
    Xml(String),
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        return String::new();
    }
    let mut s = String::from(", expected one of");
    for e in expected {
        let _ = write!(s, " `{e}`");
    }
    s
}

impl ParseError {
    pub fn line(&self) -> Option<u32> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Unsupported { line, .. } => Some(*line),
            ParseError::Xml(_) => None,
        }
    }
}

/// Parses `source` into a tree rooted at `sourceUnit`.
pub fn parse(source: &str) -> Result<ParseTree, ParseError> {
    let tokens = lexer::tokenize(source)?;
    let last_line = source.lines().count().max(1) as u32;
    let root = grammar::Parser::new(tokens, last_line).source_unit()?;
    Ok(ParseTree { root })
}

/// A statement unit together with its structural context.
#[derive(Debug, Clone)]
pub struct StatementUnit<'a> {
    /// The unit node: a simple/return/emit/throw/break/continue statement,
    /// or the compound statement whose header this unit stands for.
    pub node: &'a ParseNode,
    /// Path from the root down to and including `node`.
    pub ancestors: Vec<&'a ParseNode>,
    /// True when only the header of a compound statement belongs to the unit.
    pub header_only: bool,
    pub function: &'a ParseNode,
    pub contract: &'a ParseNode,
    pub line_start: u32,
    pub line_end: u32,
}

impl<'a> StatementUnit<'a> {
    /// Terminals making up the unit, in source order.
    pub fn terminals(&self) -> Vec<&'a ParseNode> {
        if !self.header_only {
            return self.node.terminals();
        }
        let mut out = Vec::new();
        for c in &self.node.children {
            if c.is_rule(Rule::Statement) || c.is_keyword("else") {
                break;
            }
            out.extend(c.terminals());
        }
        out
    }
}

pub fn contracts_of(tree: &ParseTree) -> Vec<&ParseNode> {
    tree.root.children.iter().filter(|c| c.is_rule(Rule::ContractDefinition)).collect()
}

fn contract_parts(contract: &ParseNode) -> impl Iterator<Item = &ParseNode> {
    contract
        .children
        .iter()
        .filter(|c| c.is_rule(Rule::ContractPart))
        .filter_map(|p| p.children.first())
}

pub fn functions_of(tree: &ParseTree) -> Vec<&ParseNode> {
    contracts_of(tree)
        .into_iter()
        .flat_map(contract_parts)
        .filter(|n| n.is_rule(Rule::FunctionDefinition))
        .collect()
}

/// Enclosing contract of each function, parallel to [`functions_of`].
pub fn functions_with_contract(tree: &ParseTree) -> Vec<(&ParseNode, &ParseNode)> {
    contracts_of(tree)
        .into_iter()
        .flat_map(|c| {
            contract_parts(c).filter(|n| n.is_rule(Rule::FunctionDefinition)).map(move |f| (f, c))
        })
        .collect()
}

pub fn statements_of(tree: &ParseTree) -> Vec<StatementUnit<'_>> {
    let mut out = Vec::new();
    let root = &tree.root;
    for contract in root.children.iter().filter(|c| c.is_rule(Rule::ContractDefinition)) {
        for part in contract.children.iter().filter(|c| c.is_rule(Rule::ContractPart)) {
            let Some(func) = part.children.first().filter(|f| f.is_rule(Rule::FunctionDefinition)) else {
                continue;
            };
            let Some(body) = func.child(Rule::Block) else { continue };
            let mut path = vec![root, contract, part, func];
            collect_units(body, &mut path, func, contract, &mut out);
        }
    }
    out
}

fn collect_units<'a>(
    node: &'a ParseNode,
    path: &mut Vec<&'a ParseNode>,
    function: &'a ParseNode,
    contract: &'a ParseNode,
    out: &mut Vec<StatementUnit<'a>>,
) {
    path.push(node);
    match node.kind {
        NodeKind::Rule(
            Rule::SimpleStatement
            | Rule::ReturnStatement
            | Rule::EmitStatement
            | Rule::ThrowStatement
            | Rule::BreakStatement
            | Rule::ContinueStatement,
        ) => out.push(StatementUnit {
            node,
            ancestors: path.clone(),
            header_only: false,
            function,
            contract,
            line_start: node.line_start,
            line_end: node.line_end,
        }),
        NodeKind::Rule(Rule::IfStatement | Rule::WhileStatement | Rule::ForStatement) => {
            let mut unit = StatementUnit {
                node,
                ancestors: path.clone(),
                header_only: true,
                function,
                contract,
                line_start: 0,
                line_end: 0,
            };
            let terms = unit.terminals();
            unit.line_start = terms.iter().map(|t| t.line_start).min().unwrap_or(node.line_start);
            unit.line_end = terms.iter().map(|t| t.line_end).max().unwrap_or(node.line_start);
            out.push(unit);
            for c in node.children.iter().filter(|c| c.is_rule(Rule::Statement)) {
                collect_units(c, path, function, contract, out);
            }
        }
        NodeKind::Rule(Rule::Block | Rule::Statement) => {
            for c in &node.children {
                collect_units(c, path, function, contract, out);
            }
        }
        _ => {}
    }
    path.pop();
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const LISTING: &str = "pragma solidity ^0.4.15;\n\ncontract Overflow {\n    uint private r=0;\n\n    function addValue(uint value) returns (bool){\n        // possible overflow\n        r += value;\n    }\n}\n";

    #[test]
    fn empty_source_is_empty_unit() {
        let t = parse("").unwrap();
        assert!(t.root.is_rule(Rule::SourceUnit));
        assert!(t.root.children.is_empty());
        assert!(contracts_of(&t).is_empty());
        assert!(functions_of(&t).is_empty());
        assert!(statements_of(&t).is_empty());
    }

    #[test]
    fn missing_semicolon_is_syntax_error() {
        let err = parse("contract A { uint x }").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err}");
    }

    #[test]
    fn listing_elements() {
        let t = parse(LISTING).unwrap();
        t.root.check_invariants().unwrap();
        assert_eq!(contracts_of(&t).len(), 1);
        assert_eq!(functions_of(&t).len(), 1);
        let units = statements_of(&t);
        assert_eq!(units.len(), 1);
        let chain: Vec<_> = units[0].ancestors.iter().map(|n| n.kind.name()).collect();
        assert_eq!(
            chain,
            [
                "sourceUnit",
                "contractDefinition",
                "contractPart",
                "functionDefinition",
                "block",
                "statement",
                "simpleStatement"
            ]
        );
        assert_eq!((units[0].line_start, units[0].line_end), (8, 8));
    }

    #[test]
    fn compound_headers_are_units() {
        let src = "contract C { function f(uint a, uint b) { if (a > b) { x = 1; } y = 2; } }";
        let t = parse(src).unwrap();
        let units = statements_of(&t);
        assert_eq!(units.len(), 3);
        assert!(units[0].header_only);
        let texts: Vec<_> = units[0].terminals().iter().map(|n| n.text().to_string()).collect();
        assert_eq!(texts, ["if", "(", "a", ">", "b", ")"]);
    }

    #[test]
    fn for_header_excludes_body() {
        let src = "contract C {\n function f() {\n for (uint i = 0; i < n; i++)\n {\n s += i;\n }\n }\n}";
        let t = parse(src).unwrap();
        let units = statements_of(&t);
        assert_eq!(units.len(), 2);
        assert_eq!((units[0].line_start, units[0].line_end), (3, 3));
        assert_eq!((units[1].line_start, units[1].line_end), (5, 5));
    }

    #[test]
    fn unsupported_is_distinct() {
        let src = "contract C { function f() { assembly { } } }";
        assert!(matches!(parse(src), Err(ParseError::Unsupported { .. })));
    }

    #[test]
    fn parses_typical_constructs() {
        let src = r#"
pragma solidity >=0.4.22 <0.6.0;
import "./SafeMath.sol";
library SafeMath {
    function mul(uint256 a, uint256 b) internal pure returns (uint256) {
        uint256 c = a * b;
        assert(a == 0 || c / a == b);
        return c;
    }
}
contract Token is Base(1), Other {
    using SafeMath for uint256;
    mapping (address => mapping (address => uint256)) public allowed;
    address[] public holders;
    event Transfer(address indexed from, address indexed to, uint256 value);
    enum State { A, B }
    struct S { uint a; address b; }
    modifier onlyOwner() { require(msg.sender == owner); _; }
    constructor(uint x) public payable { owner = msg.sender; }
    function () payable { }
    function t(address _to, uint256 _value) public onlyOwner returns (bool success) {
        (bool ok, ) = _to.call.value(_value)("");
        var (a, b) = (1, 2);
        uint[] memory arr = new uint[](3);
        balances[msg.sender] = balances[msg.sender].sub(_value);
        emit Transfer(msg.sender, _to, _value);
        for (uint i = 0; i < holders.length; i++) { if (i == 2) break; else continue; }
        while (true) { throw; }
        x = c ? 1 ether : 2 ** 3;
        delete holders;
        payable(owner).transfer(address(this).balance);
        return true;
    }
}
interface I { function f() external view returns (uint); }
"#;
        let t = parse(src).unwrap();
        t.root.check_invariants().unwrap();
        assert_eq!(contracts_of(&t).len(), 3);
    }
}
