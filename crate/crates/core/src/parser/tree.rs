use std::fmt;
use std::sync::LazyLock;

use super::lexer::{keywords, PUNCTUATION};

macro_rules! rules {
    ($($variant:ident => $name:literal,)*) => {
        /// Non-terminal node kinds.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Rule {
            $($variant,)*
        }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$(Rule::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Rule::$variant => $name,)*
                }
            }

            pub fn from_name(name: &str) -> Option<Rule> {
                match name {
                    $($name => Some(Rule::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

rules! {
    SourceUnit => "sourceUnit",
    PragmaDirective => "pragmaDirective",
    PragmaName => "pragmaName",
    PragmaValue => "pragmaValue",
    Version => "version",
    VersionConstraint => "versionConstraint",
    VersionOperator => "versionOperator",
    ImportDirective => "importDirective",
    ImportDeclaration => "importDeclaration",
    ContractDefinition => "contractDefinition",
    InheritanceSpecifier => "inheritanceSpecifier",
    ContractPart => "contractPart",
    StateVariableDeclaration => "stateVariableDeclaration",
    UsingForDeclaration => "usingForDeclaration",
    StructDefinition => "structDefinition",
    ModifierDefinition => "modifierDefinition",
    ModifierInvocation => "modifierInvocation",
    FunctionDefinition => "functionDefinition",
    ReturnParameters => "returnParameters",
    ModifierList => "modifierList",
    EventDefinition => "eventDefinition",
    EnumDefinition => "enumDefinition",
    EnumValue => "enumValue",
    ParameterList => "parameterList",
    Parameter => "parameter",
    EventParameterList => "eventParameterList",
    EventParameter => "eventParameter",
    VariableDeclaration => "variableDeclaration",
    TypeName => "typeName",
    UserDefinedTypeName => "userDefinedTypeName",
    MappingType => "mappingType",
    ElementaryTypeName => "elementaryTypeName",
    StateMutability => "stateMutability",
    StorageLocation => "storageLocation",
    Block => "block",
    Statement => "statement",
    ExpressionStatement => "expressionStatement",
    IfStatement => "ifStatement",
    WhileStatement => "whileStatement",
    ForStatement => "forStatement",
    SimpleStatement => "simpleStatement",
    ReturnStatement => "returnStatement",
    EmitStatement => "emitStatement",
    ThrowStatement => "throwStatement",
    BreakStatement => "breakStatement",
    ContinueStatement => "continueStatement",
    PlaceholderStatement => "placeholderStatement",
    VariableDeclarationStatement => "variableDeclarationStatement",
    VariableDeclarationList => "variableDeclarationList",
    IdentifierList => "identifierList",
    Expression => "expression",
    PrimaryExpression => "primaryExpression",
    ExpressionList => "expressionList",
    NameValueList => "nameValueList",
    NameValue => "nameValue",
    FunctionCallArguments => "functionCallArguments",
    NumberLiteral => "numberLiteral",
    TupleExpression => "tupleExpression",
}

/// Lexical class of a terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Keyword(&'static str),
    Identifier,
    DecimalNumber,
    HexNumber,
    HexLiteral,
    StringLiteral,
    VersionLiteral,
    /// Punctuation or operator, carrying its symbol.
    Punct(&'static str),
}

impl Term {
    /// XML element name of this terminal.
    pub fn name(self) -> &'static str {
        match self {
            Term::Keyword(k) => k,
            Term::Identifier => "Identifier",
            Term::DecimalNumber => "DecimalNumber",
            Term::HexNumber => "HexNumber",
            Term::HexLiteral => "HexLiteral",
            Term::StringLiteral => "StringLiteral",
            Term::VersionLiteral => "VersionLiteral",
            Term::Punct(sym) => PUNCTUATION
                .iter()
                .find(|(s, _)| *s == sym)
                .map(|(_, n)| *n)
                .expect("punctuation symbol without a name"),
        }
    }

    pub fn from_name(name: &str) -> Option<Term> {
        Some(match name {
            "Identifier" => Term::Identifier,
            "DecimalNumber" => Term::DecimalNumber,
            "HexNumber" => Term::HexNumber,
            "HexLiteral" => Term::HexLiteral,
            "StringLiteral" => Term::StringLiteral,
            "VersionLiteral" => Term::VersionLiteral,
            _ => {
                if let Some((sym, _)) = PUNCTUATION.iter().find(|(_, n)| *n == name) {
                    Term::Punct(sym)
                } else {
                    Term::Keyword(keywords::lookup(name)?)
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Rule(Rule),
    Terminal(Term),
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Rule(r) => r.name(),
            NodeKind::Terminal(t) => t.name(),
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One node of a parse tree. Terminals carry text and no children;
/// non-terminals carry children and no text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNode {
    pub kind: NodeKind,
    pub children: Vec<ParseNode>,
    pub token_text: Option<String>,
    pub line_start: u32,
    pub line_end: u32,
}

impl ParseNode {
    pub fn terminal(term: Term, text: impl Into<String>, line_start: u32, line_end: u32) -> Self {
        ParseNode {
            kind: NodeKind::Terminal(term),
            children: Vec::new(),
            token_text: Some(text.into()),
            line_start,
            line_end,
        }
    }

    /// Builds a non-terminal whose span covers its children.
    ///
    /// `children` must be non-empty; use [`ParseNode::empty`] for the empty
    /// source unit.
    pub fn rule(rule: Rule, children: Vec<ParseNode>) -> Self {
        assert!(!children.is_empty(), "non-terminal {} without children", rule.name());
        let line_start = children.iter().map(|c| c.line_start).min().unwrap();
        let line_end = children.iter().map(|c| c.line_end).max().unwrap();
        ParseNode {
            kind: NodeKind::Rule(rule),
            children,
            token_text: None,
            line_start,
            line_end,
        }
    }

    pub fn empty(rule: Rule, line: u32) -> Self {
        ParseNode {
            kind: NodeKind::Rule(rule),
            children: Vec::new(),
            token_text: None,
            line_start: line,
            line_end: line,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal(_))
    }

    pub fn is_rule(&self, rule: Rule) -> bool {
        self.kind == NodeKind::Rule(rule)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.kind, NodeKind::Terminal(Term::Keyword(k)) if k == kw)
    }

    pub fn term(&self) -> Option<Term> {
        match self.kind {
            NodeKind::Terminal(t) => Some(t),
            NodeKind::Rule(_) => None,
        }
    }

    pub fn text(&self) -> &str {
        self.token_text.as_deref().unwrap_or("")
    }

    /// Terminals under this node, in source order.
    pub fn terminals(&self) -> Vec<&ParseNode> {
        let mut out = Vec::new();
        self.collect_terminals(&mut out);
        out
    }

    fn collect_terminals<'a>(&'a self, out: &mut Vec<&'a ParseNode>) {
        if self.is_terminal() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_terminals(out);
            }
        }
    }

    pub fn child(&self, rule: Rule) -> Option<&ParseNode> {
        self.children.iter().find(|c| c.is_rule(rule))
    }

    /// First direct `Identifier` terminal child.
    pub fn identifier(&self) -> Option<&str> {
        self.children
            .iter()
            .find(|c| c.term() == Some(Term::Identifier))
            .map(|c| c.text())
    }

    /// Depth-first pre-order iterator over the subtree.
    pub fn walk(&self) -> impl Iterator<Item = &ParseNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    /// Checks the structural invariants recursively.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.line_start > self.line_end {
            return Err(format!("{} has inverted span {}-{}", self.kind, self.line_start, self.line_end));
        }
        match self.kind {
            NodeKind::Terminal(_) => {
                if self.token_text.is_none() || !self.children.is_empty() {
                    return Err(format!("terminal {} is malformed", self.kind));
                }
            }
            NodeKind::Rule(rule) => {
                if self.token_text.is_some() {
                    return Err(format!("non-terminal {} carries text", self.kind));
                }
                if self.children.is_empty() && rule != Rule::SourceUnit {
                    return Err(format!("non-terminal {} has no children", self.kind));
                }
            }
        }
        for c in &self.children {
            if c.line_start < self.line_start || c.line_end > self.line_end {
                return Err(format!(
                    "{} ({}-{}) escapes parent {} ({}-{})",
                    c.kind, c.line_start, c.line_end, self.kind, self.line_start, self.line_end
                ));
            }
            c.check_invariants()?;
        }
        Ok(())
    }
}

/// Parse tree of a single source file, rooted at `sourceUnit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub root: ParseNode,
}

/// Every node-kind name the parser can emit.
#[derive(Debug, Clone)]
pub struct NodeCatalog {
    pub names: Vec<&'static str>,
}

impl NodeCatalog {
    pub fn size(&self) -> usize {
        self.names.len()
    }
}

static CATALOG: LazyLock<NodeCatalog> = LazyLock::new(|| {
    let mut names: Vec<&'static str> = Rule::ALL.iter().map(|r| r.name()).collect();
    names.extend([
        "Identifier",
        "DecimalNumber",
        "HexNumber",
        "HexLiteral",
        "StringLiteral",
        "VersionLiteral",
    ]);
    names.extend(PUNCTUATION.iter().map(|(_, n)| *n));
    names.extend(keywords::all().iter().copied());
    NodeCatalog { names }
});

pub fn node_catalog() -> &'static NodeCatalog {
    &CATALOG
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalog_names_are_unique() {
        let cat = node_catalog();
        let set: HashSet<_> = cat.names.iter().collect();
        assert_eq!(set.len(), cat.size());
    }

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(Rule::from_name(r.name()), Some(*r));
        }
    }

    #[test]
    fn term_names_round_trip() {
        for (sym, _) in PUNCTUATION {
            let t = Term::Punct(*sym);
            assert_eq!(Term::from_name(t.name()), Some(t));
        }
        assert_eq!(Term::from_name("pragma"), Some(Term::Keyword("pragma")));
        assert_eq!(Term::from_name("uint256"), Some(Term::Keyword("uint256")));
        assert_eq!(Term::from_name("notAKeyword"), None);
    }
}
