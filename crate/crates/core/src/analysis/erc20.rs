use std::collections::BTreeSet;

use crate::parser::{contracts_of, ParseNode, ParseTree, Rule, Term};

/// Names and parameter counts of the ERC20 functions.
pub const ERC20_FUNCTIONS: [(&str, usize); 6] = [
    ("totalSupply", 0),
    ("balanceOf", 1),
    ("transfer", 2),
    ("transferFrom", 3),
    ("approve", 2),
    ("allowance", 2),
];

fn function_signature(f: &ParseNode) -> Option<(String, usize)> {
    let name = f.identifier()?;
    let params = f.child(Rule::ParameterList)?;
    Some((name.to_string(), params.children.iter().filter(|c| c.is_rule(Rule::Parameter)).count()))
}

/// Arguments the compiler-generated getter of a state variable takes: one
/// per mapping level and per array dimension.
fn getter_arity(ty: &ParseNode) -> usize {
    let dims = ty.children.iter().filter(|c| c.term() == Some(Term::Punct("["))).count();
    let nested = match ty.children.first() {
        Some(m) if m.is_rule(Rule::MappingType) => {
            1 + m.children.iter().rev().find(|c| c.is_rule(Rule::TypeName)).map_or(0, getter_arity)
        }
        Some(inner) if inner.is_rule(Rule::TypeName) => getter_arity(inner),
        _ => 0,
    };
    dims + nested
}

fn getter_signature(v: &ParseNode) -> Option<(String, usize)> {
    if !v.children.iter().any(|c| c.is_keyword("public")) {
        return None;
    }
    Some((v.identifier()?.to_string(), getter_arity(v.child(Rule::TypeName)?)))
}

/// Whether the file, taken as a whole, provides all six ERC20 functions by
/// name and arity. Public state variables count through their getters.
pub fn erc20_check(tree: &ParseTree) -> bool {
    let mut provided = BTreeSet::new();
    for c in contracts_of(tree) {
        for part in c.children.iter().filter(|p| p.is_rule(Rule::ContractPart)) {
            let Some(item) = part.children.first() else { continue };
            let sig = if item.is_rule(Rule::FunctionDefinition) {
                function_signature(item)
            } else if item.is_rule(Rule::StateVariableDeclaration) {
                getter_signature(item)
            } else {
                None
            };
            provided.extend(sig);
        }
    }
    ERC20_FUNCTIONS.iter().all(|(n, a)| provided.contains(&(n.to_string(), *a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bugdb::exemplars::OVERFLOW;
    use crate::parser::parse;

    const SKELETON: &str = "contract Token {
    function totalSupply() constant returns (uint) {}
    function balanceOf(address who) constant returns (uint) {}
    function transfer(address to, uint value) returns (bool) {}
    function transferFrom(address from, address to, uint value) returns (bool) {}
    function approve(address spender, uint value) returns (bool) {}
    function allowance(address owner, address spender) constant returns (uint) {}
}";

    #[test]
    fn full_skeleton() {
        assert!(erc20_check(&parse(SKELETON).unwrap()));
    }

    #[test]
    fn five_of_six() {
        let src = SKELETON.replace("function approve(address spender, uint value) returns (bool) {}", "");
        assert!(!erc20_check(&parse(&src).unwrap()));
    }

    #[test]
    fn wrong_arity() {
        let src = SKELETON.replace("function balanceOf(address who)", "function balanceOf()");
        assert!(!erc20_check(&parse(&src).unwrap()));
    }

    #[test]
    fn overflow_listing() {
        assert!(!erc20_check(&parse(OVERFLOW).unwrap()));
    }

    #[test]
    fn getters_and_split_files() {
        let src = "contract Base {
    uint public totalSupply;
    mapping (address => uint) public balanceOf;
    mapping (address => mapping (address => uint)) public allowance;
}
contract Token is Base {
    function transfer(address to, uint value) returns (bool) {}
    function transferFrom(address from, address to, uint value) returns (bool) {}
    function approve(address spender, uint value) returns (bool) {}
}";
        assert!(erc20_check(&parse(src).unwrap()));
        assert!(!erc20_check(&parse(&src.replace("public allowance", "allowance")).unwrap()));
    }
}
