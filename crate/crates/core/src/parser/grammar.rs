use super::lexer::{keywords, Token};
use super::tree::{ParseNode, Rule, Term};
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

const VISIBILITY: &[&str] = &["public", "private", "internal", "external"];
const MUTABILITY: &[&str] = &["pure", "view", "payable", "constant"];
const ASSIGN_OPS: &[&str] = &["=", "|=", "^=", "&=", "<<=", ">>=", "+=", "-=", "*=", "/=", "%="];

/// Binary operators by increasing precedence.
const BINARY_LEVELS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["|"],
    &["^"],
    &["&"],
    &["<<", ">>"],
    &["+", "-"],
    &["*", "/", "%"],
    &["**"],
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    last_line: u32,
}

impl Parser {
    pub fn new(toks: Vec<Token>, last_line: u32) -> Self {
        Parser { toks, pos: 0, last_line }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn at_punct(&self, sym: &str) -> bool {
        matches!(self.peek(), Some(Token { term: Term::Punct(p), .. }) if *p == sym)
    }

    fn at_punct_at(&self, n: usize, sym: &str) -> bool {
        matches!(self.peek_at(n), Some(Token { term: Term::Punct(p), .. }) if *p == sym)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { term: Term::Keyword(k), .. }) if *k == kw)
    }

    fn at_any_kw(&self, kws: &[&str]) -> bool {
        matches!(self.peek(), Some(Token { term: Term::Keyword(k), .. }) if kws.contains(k))
    }

    fn at_ident(&self) -> bool {
        matches!(self.peek(), Some(t) if t.term == Term::Identifier)
    }

    fn at_elementary(&self) -> bool {
        matches!(self.peek(), Some(Token { term: Term::Keyword(k), .. }) if keywords::is_elementary_type(k))
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (line, column, found) = match self.peek() {
            Some(t) => (t.line, t.column, format!("`{}`", t.text)),
            None => (self.last_line, 0, "end of input".to_string()),
        };
        ParseError::Syntax {
            line,
            column,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        let t = self.peek().expect("unsupported construct at end of input");
        ParseError::Unsupported { line: t.line, column: t.column, construct: construct.to_string() }
    }

    fn bump(&mut self) -> ParseNode {
        let t = &self.toks[self.pos];
        self.pos += 1;
        ParseNode::terminal(t.term, t.text.clone(), t.line, t.end_line)
    }

    fn expect_punct(&mut self, sym: &str) -> PResult<ParseNode> {
        if self.at_punct(sym) {
            Ok(self.bump())
        } else {
            Err(self.error(&[sym]))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<ParseNode> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.error(&[kw]))
        }
    }

    fn expect_ident(&mut self) -> PResult<ParseNode> {
        if self.at_ident() {
            Ok(self.bump())
        } else {
            Err(self.error(&["identifier"]))
        }
    }

    pub fn source_unit(&mut self) -> PResult<ParseNode> {
        let mut children = Vec::new();
        while let Some(t) = self.peek() {
            let node = match t.term {
                Term::Keyword("pragma") => self.pragma_directive()?,
                Term::Keyword("import") => self.import_directive()?,
                Term::Keyword("contract" | "library" | "interface" | "abstract") => {
                    self.contract_definition()?
                }
                Term::Keyword("function") => return Err(self.unsupported("free function")),
                Term::Keyword("struct") | Term::Keyword("enum") | Term::Keyword("using") => {
                    return Err(self.unsupported("file-level declaration"))
                }
                _ => {
                    return Err(self.error(&["pragma", "import", "contract", "library", "interface"]))
                }
            };
            children.push(node);
        }
        Ok(if children.is_empty() {
            ParseNode::empty(Rule::SourceUnit, 1)
        } else {
            ParseNode::rule(Rule::SourceUnit, children)
        })
    }

    fn pragma_directive(&mut self) -> PResult<ParseNode> {
        let kw = self.expect_kw("pragma")?;
        let name = ParseNode::rule(Rule::PragmaName, vec![self.expect_ident()?]);
        let value = if matches!(self.peek(), Some(t) if t.term == Term::VersionLiteral)
            || self.at_any_punct(&["^", "~", ">=", "<=", ">", "<", "="])
        {
            let mut constraints = vec![self.version_constraint()?];
            while !self.at_punct(";") {
                if self.at_punct("||") || self.at_punct("-") {
                    constraints.push(self.bump());
                }
                constraints.push(self.version_constraint()?);
            }
            ParseNode::rule(Rule::Version, constraints)
        } else {
            self.expression()?
        };
        let value = ParseNode::rule(Rule::PragmaValue, vec![value]);
        let semi = self.expect_punct(";")?;
        Ok(ParseNode::rule(Rule::PragmaDirective, vec![kw, name, value, semi]))
    }

    fn at_any_punct(&self, syms: &[&str]) -> bool {
        matches!(self.peek(), Some(Token { term: Term::Punct(p), .. }) if syms.contains(p))
    }

    fn version_constraint(&mut self) -> PResult<ParseNode> {
        let mut children = Vec::new();
        if self.at_any_punct(&["^", "~", ">=", "<=", ">", "<", "="]) {
            children.push(ParseNode::rule(Rule::VersionOperator, vec![self.bump()]));
        }
        match self.peek() {
            Some(t) if t.term == Term::VersionLiteral => children.push(self.bump()),
            _ => return Err(self.error(&["version literal"])),
        }
        Ok(ParseNode::rule(Rule::VersionConstraint, children))
    }

    fn import_directive(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("import")?];
        match self.peek().map(|t| t.term) {
            Some(Term::StringLiteral) => {
                children.push(self.bump());
                if self.at_kw("as") {
                    children.push(self.bump());
                    children.push(self.expect_ident()?);
                }
            }
            Some(Term::Punct("*")) => {
                children.push(self.bump());
                children.push(self.expect_kw("as")?);
                children.push(self.expect_ident()?);
                children.push(self.import_from()?);
                children.push(self.import_path()?);
            }
            Some(Term::Punct("{")) => {
                children.push(self.bump());
                loop {
                    let mut decl = vec![self.expect_ident()?];
                    if self.at_kw("as") {
                        decl.push(self.bump());
                        decl.push(self.expect_ident()?);
                    }
                    children.push(ParseNode::rule(Rule::ImportDeclaration, decl));
                    if self.at_punct(",") {
                        children.push(self.bump());
                    } else {
                        break;
                    }
                }
                children.push(self.expect_punct("}")?);
                children.push(self.import_from()?);
                children.push(self.import_path()?);
            }
            _ => return Err(self.error(&["string literal", "*", "{"])),
        }
        children.push(self.expect_punct(";")?);
        Ok(ParseNode::rule(Rule::ImportDirective, children))
    }

    fn import_from(&mut self) -> PResult<ParseNode> {
        match self.peek() {
            Some(t) if t.term == Term::Identifier && t.text == "from" => Ok(self.bump()),
            _ => Err(self.error(&["from"])),
        }
    }

    fn import_path(&mut self) -> PResult<ParseNode> {
        match self.peek() {
            Some(t) if t.term == Term::StringLiteral => Ok(self.bump()),
            _ => Err(self.error(&["string literal"])),
        }
    }

    fn contract_definition(&mut self) -> PResult<ParseNode> {
        let mut children = Vec::new();
        if self.at_kw("abstract") {
            children.push(self.bump());
        }
        if self.at_any_kw(&["contract", "library", "interface"]) {
            children.push(self.bump());
        } else {
            return Err(self.error(&["contract", "library", "interface"]));
        }
        children.push(self.expect_ident()?);
        if self.at_kw("is") {
            children.push(self.bump());
            loop {
                let mut spec = vec![self.user_defined_type_name()?];
                if self.at_punct("(") {
                    spec.push(self.bump());
                    if !self.at_punct(")") {
                        spec.push(self.expression_list()?);
                    }
                    spec.push(self.expect_punct(")")?);
                }
                children.push(ParseNode::rule(Rule::InheritanceSpecifier, spec));
                if self.at_punct(",") {
                    children.push(self.bump());
                } else {
                    break;
                }
            }
        }
        children.push(self.expect_punct("{")?);
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return Err(self.error(&["}"]));
            }
            let part = self.contract_part()?;
            children.push(ParseNode::rule(Rule::ContractPart, vec![part]));
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::ContractDefinition, children))
    }

    fn contract_part(&mut self) -> PResult<ParseNode> {
        let t = self.peek().unwrap();
        match t.term {
            Term::Keyword("function" | "constructor" | "fallback" | "receive") => self.function_definition(),
            Term::Keyword("modifier") => self.modifier_definition(),
            Term::Keyword("event") => self.event_definition(),
            Term::Keyword("struct") => self.struct_definition(),
            Term::Keyword("enum") => self.enum_definition(),
            Term::Keyword("using") => self.using_for(),
            Term::Identifier
                if t.text == "error"
                    && matches!(self.peek_at(1), Some(n) if n.term == Term::Identifier)
                    && self.at_punct_at(2, "(") =>
            {
                Err(self.unsupported("custom error definition"))
            }
            _ => self.state_variable_declaration(),
        }
    }

    fn state_variable_declaration(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.type_name()?];
        while self.at_any_kw(&["public", "private", "internal", "constant", "immutable", "override"]) {
            children.push(self.bump());
        }
        children.push(self.expect_ident()?);
        if self.at_punct("=") {
            children.push(self.bump());
            children.push(self.expression()?);
        }
        if !self.at_punct(";") {
            return Err(self.error(&[";", "="]));
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::StateVariableDeclaration, children))
    }

    fn using_for(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("using")?, self.user_defined_type_name()?];
        children.push(self.expect_kw("for")?);
        if self.at_punct("*") {
            children.push(self.bump());
        } else {
            children.push(self.type_name()?);
        }
        children.push(self.expect_punct(";")?);
        Ok(ParseNode::rule(Rule::UsingForDeclaration, children))
    }

    fn struct_definition(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("struct")?, self.expect_ident()?];
        children.push(self.expect_punct("{")?);
        while !self.at_punct("}") {
            let ty = self.type_name()?;
            let name = self.expect_ident()?;
            children.push(ParseNode::rule(Rule::VariableDeclaration, vec![ty, name]));
            children.push(self.expect_punct(";")?);
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::StructDefinition, children))
    }

    fn enum_definition(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("enum")?, self.expect_ident()?];
        children.push(self.expect_punct("{")?);
        while !self.at_punct("}") {
            children.push(ParseNode::rule(Rule::EnumValue, vec![self.expect_ident()?]));
            if self.at_punct(",") {
                children.push(self.bump());
            } else if !self.at_punct("}") {
                return Err(self.error(&[",", "}"]));
            }
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::EnumDefinition, children))
    }

    fn event_definition(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("event")?, self.expect_ident()?];
        let mut params = vec![self.expect_punct("(")?];
        while !self.at_punct(")") {
            let mut p = vec![self.type_name()?];
            if self.at_kw("indexed") {
                p.push(self.bump());
            }
            if self.at_ident() {
                p.push(self.bump());
            }
            params.push(ParseNode::rule(Rule::EventParameter, p));
            if self.at_punct(",") {
                params.push(self.bump());
            } else if !self.at_punct(")") {
                return Err(self.error(&[",", ")"]));
            }
        }
        params.push(self.bump());
        children.push(ParseNode::rule(Rule::EventParameterList, params));
        if self.at_kw("anonymous") {
            children.push(self.bump());
        }
        children.push(self.expect_punct(";")?);
        Ok(ParseNode::rule(Rule::EventDefinition, children))
    }

    fn modifier_definition(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_kw("modifier")?, self.expect_ident()?];
        if self.at_punct("(") {
            children.push(self.parameter_list()?);
        }
        while self.at_any_kw(&["virtual", "override"]) {
            children.push(self.bump());
        }
        children.push(self.block()?);
        Ok(ParseNode::rule(Rule::ModifierDefinition, children))
    }

    fn function_definition(&mut self) -> PResult<ParseNode> {
        let mut children = Vec::new();
        let head = self.bump();
        let is_function = head.is_keyword("function");
        children.push(head);
        if is_function && self.at_ident() {
            children.push(self.bump());
        }
        children.push(self.parameter_list()?);
        let mut modifiers = Vec::new();
        loop {
            if self.at_any_kw(VISIBILITY) || self.at_any_kw(&["virtual", "override"]) {
                modifiers.push(self.bump());
            } else if self.at_any_kw(MUTABILITY) {
                modifiers.push(ParseNode::rule(Rule::StateMutability, vec![self.bump()]));
            } else if self.at_ident() {
                let mut inv = vec![self.bump()];
                if self.at_punct("(") {
                    inv.push(self.bump());
                    if !self.at_punct(")") {
                        inv.push(self.expression_list()?);
                    }
                    inv.push(self.expect_punct(")")?);
                }
                modifiers.push(ParseNode::rule(Rule::ModifierInvocation, inv));
            } else {
                break;
            }
        }
        if !modifiers.is_empty() {
            children.push(ParseNode::rule(Rule::ModifierList, modifiers));
        }
        if self.at_kw("returns") {
            let kw = self.bump();
            children.push(ParseNode::rule(Rule::ReturnParameters, vec![kw, self.parameter_list()?]));
        }
        if self.at_punct(";") {
            children.push(self.bump());
        } else if self.at_punct("{") {
            children.push(self.block()?);
        } else {
            return Err(self.error(&[";", "{", "returns", "modifier"]));
        }
        Ok(ParseNode::rule(Rule::FunctionDefinition, children))
    }

    fn parameter_list(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_punct("(")?];
        while !self.at_punct(")") {
            let mut p = vec![self.type_name()?];
            if self.at_any_kw(&["memory", "storage", "calldata"]) {
                p.push(ParseNode::rule(Rule::StorageLocation, vec![self.bump()]));
            }
            if self.at_ident() {
                p.push(self.bump());
            }
            children.push(ParseNode::rule(Rule::Parameter, p));
            if self.at_punct(",") {
                children.push(self.bump());
            } else if !self.at_punct(")") {
                return Err(self.error(&[",", ")"]));
            }
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::ParameterList, children))
    }

    fn user_defined_type_name(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_ident()?];
        while self.at_punct(".") && matches!(self.peek_at(1), Some(t) if t.term == Term::Identifier) {
            children.push(self.bump());
            children.push(self.bump());
        }
        Ok(ParseNode::rule(Rule::UserDefinedTypeName, children))
    }

    fn elementary_type_name(&mut self) -> PResult<ParseNode> {
        if !self.at_elementary() {
            return Err(self.error(&["elementary type"]));
        }
        let mut children = vec![self.bump()];
        if children[0].is_keyword("address") && self.at_kw("payable") {
            children.push(self.bump());
        }
        Ok(ParseNode::rule(Rule::ElementaryTypeName, children))
    }

    fn type_name(&mut self) -> PResult<ParseNode> {
        let base = if self.at_elementary() {
            self.elementary_type_name()?
        } else if self.at_kw("mapping") {
            let mut m = vec![self.bump(), self.expect_punct("(")?];
            m.push(self.type_name()?);
            m.push(self.expect_punct("=>")?);
            m.push(self.type_name()?);
            m.push(self.expect_punct(")")?);
            ParseNode::rule(Rule::MappingType, m)
        } else if self.at_kw("function") {
            return Err(self.unsupported("function type"));
        } else if self.at_ident() {
            self.user_defined_type_name()?
        } else {
            return Err(self.error(&["type name"]));
        };
        let mut ty = ParseNode::rule(Rule::TypeName, vec![base]);
        while self.at_punct("[") {
            let mut children = vec![ty, self.bump()];
            if !self.at_punct("]") {
                children.push(self.expression()?);
            }
            children.push(self.expect_punct("]")?);
            ty = ParseNode::rule(Rule::TypeName, children);
        }
        Ok(ty)
    }

    fn block(&mut self) -> PResult<ParseNode> {
        let mut children = vec![self.expect_punct("{")?];
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return Err(self.error(&["}"]));
            }
            children.push(self.statement()?);
        }
        children.push(self.bump());
        Ok(ParseNode::rule(Rule::Block, children))
    }

    fn statement(&mut self) -> PResult<ParseNode> {
        let t = self.peek().ok_or_else(|| self.error(&["statement"]))?;
        let inner = match t.term {
            Term::Punct("{") => self.block()?,
            Term::Keyword("if") => self.if_statement()?,
            Term::Keyword("while") => self.while_statement()?,
            Term::Keyword("for") => self.for_statement()?,
            Term::Keyword("return") => {
                let mut c = vec![self.bump()];
                if !self.at_punct(";") {
                    c.push(self.expression()?);
                }
                c.push(self.expect_punct(";")?);
                ParseNode::rule(Rule::ReturnStatement, c)
            }
            Term::Keyword("emit") => {
                let kw = self.bump();
                let call = self.expression()?;
                let semi = self.expect_punct(";")?;
                ParseNode::rule(Rule::EmitStatement, vec![kw, call, semi])
            }
            Term::Keyword("throw") => {
                let kw = self.bump();
                ParseNode::rule(Rule::ThrowStatement, vec![kw, self.expect_punct(";")?])
            }
            Term::Keyword("break") => {
                let kw = self.bump();
                ParseNode::rule(Rule::BreakStatement, vec![kw, self.expect_punct(";")?])
            }
            Term::Keyword("continue") => {
                let kw = self.bump();
                ParseNode::rule(Rule::ContinueStatement, vec![kw, self.expect_punct(";")?])
            }
            Term::Identifier if t.text == "_" && self.at_punct_at(1, ";") => {
                let u = self.bump();
                ParseNode::rule(Rule::PlaceholderStatement, vec![u, self.bump()])
            }
            Term::Keyword("assembly") => return Err(self.unsupported("inline assembly")),
            Term::Keyword("do") => return Err(self.unsupported("do-while loop")),
            Term::Keyword("try") => return Err(self.unsupported("try/catch")),
            Term::Keyword("unchecked") => return Err(self.unsupported("unchecked block")),
            _ => self.simple_statement()?,
        };
        Ok(ParseNode::rule(Rule::Statement, vec![inner]))
    }

    fn if_statement(&mut self) -> PResult<ParseNode> {
        let mut c = vec![self.bump(), self.expect_punct("(")?];
        c.push(self.expression()?);
        c.push(self.expect_punct(")")?);
        c.push(self.statement()?);
        if self.at_kw("else") {
            c.push(self.bump());
            c.push(self.statement()?);
        }
        Ok(ParseNode::rule(Rule::IfStatement, c))
    }

    fn while_statement(&mut self) -> PResult<ParseNode> {
        let mut c = vec![self.bump(), self.expect_punct("(")?];
        c.push(self.expression()?);
        c.push(self.expect_punct(")")?);
        c.push(self.statement()?);
        Ok(ParseNode::rule(Rule::WhileStatement, c))
    }

    fn for_statement(&mut self) -> PResult<ParseNode> {
        let mut c = vec![self.bump(), self.expect_punct("(")?];
        if self.at_punct(";") {
            c.push(self.bump());
        } else {
            c.push(self.simple_statement()?);
        }
        if self.at_punct(";") {
            c.push(self.bump());
        } else {
            let e = self.expression()?;
            let semi = self.expect_punct(";")?;
            c.push(ParseNode::rule(Rule::ExpressionStatement, vec![e, semi]));
        }
        if !self.at_punct(")") {
            c.push(self.expression()?);
        }
        c.push(self.expect_punct(")")?);
        c.push(self.statement()?);
        Ok(ParseNode::rule(Rule::ForStatement, c))
    }

    fn simple_statement(&mut self) -> PResult<ParseNode> {
        let inner = if let Some(decl) = self.try_variable_declaration_statement()? {
            decl
        } else {
            let e = self.expression()?;
            let semi = self.expect_punct(";")?;
            ParseNode::rule(Rule::ExpressionStatement, vec![e, semi])
        };
        Ok(ParseNode::rule(Rule::SimpleStatement, vec![inner]))
    }

    /// Tries the declaration readings of a simple statement, backtracking
    /// to an expression statement when none applies.
    fn try_variable_declaration_statement(&mut self) -> PResult<Option<ParseNode>> {
        let start = self.pos;
        let mut head = Vec::new();
        if self.at_kw("var") {
            head.push(self.bump());
            if self.at_punct("(") {
                let mut list = vec![self.bump()];
                while !self.at_punct(")") {
                    if self.at_ident() {
                        list.push(self.bump());
                    }
                    if self.at_punct(",") {
                        list.push(self.bump());
                    } else if !self.at_punct(")") {
                        return Err(self.error(&[",", ")"]));
                    }
                }
                list.push(self.bump());
                head.push(ParseNode::rule(Rule::IdentifierList, list));
            } else {
                head.push(self.expect_ident()?);
            }
        } else if self.at_punct("(") {
            match self.tuple_declaration() {
                Some(list) if self.at_punct("=") => head.push(list),
                _ => {
                    self.pos = start;
                    return Ok(None);
                }
            }
        } else {
            match self.variable_declaration() {
                Some(decl) if self.at_punct("=") || self.at_punct(";") => head.push(decl),
                _ => {
                    self.pos = start;
                    return Ok(None);
                }
            }
        }
        if self.at_punct("=") {
            head.push(self.bump());
            head.push(self.expression()?);
        }
        head.push(self.expect_punct(";")?);
        Ok(Some(ParseNode::rule(Rule::VariableDeclarationStatement, head)))
    }

    fn variable_declaration(&mut self) -> Option<ParseNode> {
        let ty = self.type_name().ok()?;
        let mut c = vec![ty];
        if self.at_any_kw(&["memory", "storage", "calldata"]) {
            c.push(ParseNode::rule(Rule::StorageLocation, vec![self.bump()]));
        }
        if !self.at_ident() {
            return None;
        }
        c.push(self.bump());
        Some(ParseNode::rule(Rule::VariableDeclaration, c))
    }

    fn tuple_declaration(&mut self) -> Option<ParseNode> {
        let mut c = vec![self.bump()];
        let mut saw_decl = false;
        while !self.at_punct(")") {
            if !self.at_punct(",") {
                c.push(self.variable_declaration()?);
                saw_decl = true;
            }
            if self.at_punct(",") {
                c.push(self.bump());
            } else if !self.at_punct(")") {
                return None;
            }
        }
        c.push(self.bump());
        saw_decl.then(|| ParseNode::rule(Rule::VariableDeclarationList, c))
    }

    fn expression_list(&mut self) -> PResult<ParseNode> {
        let mut c = vec![self.expression()?];
        while self.at_punct(",") {
            c.push(self.bump());
            c.push(self.expression()?);
        }
        Ok(ParseNode::rule(Rule::ExpressionList, c))
    }

    pub fn expression(&mut self) -> PResult<ParseNode> {
        let lhs = self.ternary()?;
        if self.at_any_punct(ASSIGN_OPS) {
            let op = self.bump();
            let rhs = self.expression()?;
            return Ok(ParseNode::rule(Rule::Expression, vec![lhs, op, rhs]));
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<ParseNode> {
        let cond = self.binary(0)?;
        if self.at_punct("?") {
            let q = self.bump();
            let a = self.expression()?;
            let colon = self.expect_punct(":")?;
            let b = self.expression()?;
            return Ok(ParseNode::rule(Rule::Expression, vec![cond, q, a, colon, b]));
        }
        Ok(cond)
    }

    fn binary(&mut self, level: usize) -> PResult<ParseNode> {
        if level == BINARY_LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while self.at_any_punct(BINARY_LEVELS[level]) {
            let op = self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = ParseNode::rule(Rule::Expression, vec![lhs, op, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<ParseNode> {
        if self.at_any_punct(&["!", "~", "-", "+", "++", "--"]) || self.at_kw("delete") {
            let op = self.bump();
            let operand = self.unary()?;
            return Ok(ParseNode::rule(Rule::Expression, vec![op, operand]));
        }
        if self.at_kw("new") {
            let kw = self.bump();
            let ty = self.type_name()?;
            let e = ParseNode::rule(Rule::Expression, vec![kw, ty]);
            return self.postfix(e);
        }
        let primary = self.primary()?;
        self.postfix(primary)
    }

    fn postfix(&mut self, mut e: ParseNode) -> PResult<ParseNode> {
        loop {
            if self.at_punct("++") || self.at_punct("--") {
                let op = self.bump();
                e = ParseNode::rule(Rule::Expression, vec![e, op]);
            } else if self.at_punct(".") {
                let dot = self.bump();
                let member = match self.peek() {
                    Some(t) if t.term == Term::Identifier => self.bump(),
                    // `address.balance`-style members that lex as keywords
                    Some(Token { term: Term::Keyword(_), .. }) => self.bump(),
                    _ => return Err(self.error(&["member name"])),
                };
                e = ParseNode::rule(Rule::Expression, vec![e, dot, member]);
            } else if self.at_punct("[") {
                let mut c = vec![e, self.bump()];
                if !self.at_punct("]") {
                    c.push(self.expression()?);
                }
                c.push(self.expect_punct("]")?);
                e = ParseNode::rule(Rule::Expression, c);
            } else if self.at_punct("(") {
                let mut c = vec![e, self.bump()];
                if self.at_punct("{") {
                    c.push(ParseNode::rule(Rule::FunctionCallArguments, vec![self.name_value_list()?]));
                } else if !self.at_punct(")") {
                    c.push(ParseNode::rule(Rule::FunctionCallArguments, vec![self.expression_list()?]));
                }
                c.push(self.expect_punct(")")?);
                e = ParseNode::rule(Rule::Expression, c);
            } else {
                return Ok(e);
            }
        }
    }

    fn name_value_list(&mut self) -> PResult<ParseNode> {
        let mut c = vec![self.expect_punct("{")?];
        while !self.at_punct("}") {
            let name = self.expect_ident()?;
            let colon = self.expect_punct(":")?;
            let value = self.expression()?;
            c.push(ParseNode::rule(Rule::NameValue, vec![name, colon, value]));
            if self.at_punct(",") {
                c.push(self.bump());
            } else if !self.at_punct("}") {
                return Err(self.error(&[",", "}"]));
            }
        }
        c.push(self.bump());
        Ok(ParseNode::rule(Rule::NameValueList, c))
    }

    fn primary(&mut self) -> PResult<ParseNode> {
        let Some(t) = self.peek() else {
            return Err(self.error(&["expression"]));
        };
        let inner = match t.term {
            Term::Identifier | Term::StringLiteral | Term::HexLiteral => self.bump(),
            Term::Keyword("true" | "false") => self.bump(),
            Term::DecimalNumber | Term::HexNumber => {
                let mut c = vec![self.bump()];
                if self.at_any_kw(keywords::UNITS) {
                    c.push(self.bump());
                }
                ParseNode::rule(Rule::NumberLiteral, c)
            }
            Term::Keyword("payable") if self.at_punct_at(1, "(") => self.bump(),
            Term::Keyword(k) if keywords::is_elementary_type(k) => {
                let mut ty = self.elementary_type_name()?;
                // `uint[]`/`uint[](n)` style type expressions
                while self.at_punct("[") && self.at_punct_at(1, "]") {
                    let open = self.bump();
                    let close = self.bump();
                    ty = ParseNode::rule(Rule::TypeName, vec![ty, open, close]);
                }
                ty
            }
            Term::Punct("(") | Term::Punct("[") => {
                let close = if t.term == Term::Punct("(") { ")" } else { "]" };
                let mut c = vec![self.bump()];
                while !self.at_punct(close) {
                    if !self.at_punct(",") {
                        c.push(self.expression()?);
                    }
                    if self.at_punct(",") {
                        c.push(self.bump());
                    } else if !self.at_punct(close) {
                        return Err(self.error(&[",", close]));
                    }
                }
                c.push(self.bump());
                ParseNode::rule(Rule::TupleExpression, c)
            }
            Term::Keyword("type") => return Err(self.unsupported("type expression")),
            _ => return Err(self.error(&["identifier", "literal", "(", "["])),
        };
        Ok(ParseNode::rule(
            Rule::Expression,
            vec![ParseNode::rule(Rule::PrimaryExpression, vec![inner])],
        ))
    }
}
