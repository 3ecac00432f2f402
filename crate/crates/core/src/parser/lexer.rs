//! Tokenizer for the supported Solidity subset.
//!
//! Comments and whitespace are dropped here. Literal classes are decided
//! here too, so later stages never re-inspect token text to tell an
//! identifier from a number. Inside a `pragma` directive, dotted numbers
//! such as `0.4.15` lex as a single `VersionLiteral`.

use super::tree::Term;
use super::ParseError;

/// Punctuation and operators with their XML element names, longest first.
pub const PUNCTUATION: &[(&str, &str)] = &[
    ("<<=", "shlAssign"),
    (">>=", "shrAssign"),
    ("=>", "arrow"),
    ("==", "eq"),
    ("!=", "neq"),
    ("<=", "le"),
    (">=", "ge"),
    ("&&", "and"),
    ("||", "or"),
    ("++", "inc"),
    ("--", "dec"),
    ("+=", "addAssign"),
    ("-=", "subAssign"),
    ("*=", "mulAssign"),
    ("/=", "divAssign"),
    ("%=", "modAssign"),
    ("|=", "orAssign"),
    ("&=", "andAssign"),
    ("^=", "xorAssign"),
    ("<<", "shl"),
    (">>", "shr"),
    ("**", "pow"),
    ("+", "plus"),
    ("-", "minus"),
    ("*", "star"),
    ("/", "slash"),
    ("%", "percent"),
    ("!", "bang"),
    ("~", "tilde"),
    ("&", "amp"),
    ("|", "pipe"),
    ("^", "caret"),
    ("<", "lt"),
    (">", "gt"),
    ("=", "assign"),
    ("?", "question"),
    (":", "colon"),
    (".", "dot"),
    (",", "comma"),
    (";", "semicolon"),
    ("(", "lparen"),
    (")", "rparen"),
    ("{", "lbrace"),
    ("}", "rbrace"),
    ("[", "lbracket"),
    ("]", "rbracket"),
];

pub mod keywords {
    use std::sync::LazyLock;

    const BASE: &[&str] = &[
        "abstract", "address", "anonymous", "as", "assembly", "bool", "break", "byte", "bytes",
        "calldata", "catch", "constant", "constructor", "continue", "contract", "delete", "do",
        "else", "emit", "enum", "event", "external", "fallback", "false", "fixed", "for",
        "function", "if", "immutable", "import", "indexed", "int", "interface", "internal", "is",
        "library", "mapping", "memory", "modifier", "new", "override", "payable", "pragma",
        "private", "public", "pure", "receive", "return", "returns", "storage", "string",
        "struct", "throw", "true", "try", "ufixed", "uint", "unchecked", "using", "var", "view",
        "virtual", "while", "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes",
        "hours", "days", "weeks", "years",
    ];

    pub const UNITS: &[&str] = &[
        "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks",
        "years",
    ];

    static ALL: LazyLock<Vec<&'static str>> = LazyLock::new(|| {
        let mut all: Vec<&'static str> = BASE.to_vec();
        for bits in (8..=256).step_by(8) {
            all.push(Box::leak(format!("int{bits}").into_boxed_str()));
            all.push(Box::leak(format!("uint{bits}").into_boxed_str()));
        }
        for n in 1..=32 {
            all.push(Box::leak(format!("bytes{n}").into_boxed_str()));
        }
        all
    });

    pub fn all() -> &'static [&'static str] {
        &ALL
    }

    pub fn lookup(text: &str) -> Option<&'static str> {
        ALL.iter().copied().find(|k| *k == text)
    }

    /// Keywords that name an elementary type.
    pub fn is_elementary_type(kw: &str) -> bool {
        matches!(kw, "address" | "bool" | "string" | "var" | "byte" | "bytes" | "fixed" | "ufixed")
            || (kw.starts_with("uint") && kw[4..].bytes().all(|b| b.is_ascii_digit()))
            || (kw.starts_with("int") && kw[3..].bytes().all(|b| b.is_ascii_digit()))
            || (kw.starts_with("bytes") && kw[5..].bytes().all(|b| b.is_ascii_digit()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub term: Term,
    pub text: String,
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, found: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            found: found.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                return Err(ParseError::Syntax {
                                    line,
                                    column,
                                    found: "unterminated block comment".into(),
                                    expected: vec!["*/".into()],
                                })
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn string(&mut self) -> Result<(), ParseError> {
        let (line, column) = (self.line, self.column);
        let quote = self.bump().unwrap();
        loop {
            match self.bump() {
                Some('\\') => {
                    self.bump();
                }
                Some(c) if c == quote => return Ok(()),
                Some('\n') | None => {
                    return Err(ParseError::Syntax {
                        line,
                        column,
                        found: "unterminated string literal".into(),
                        expected: vec![quote.to_string()],
                    })
                }
                Some(_) => {}
            }
        }
    }

    fn next_token(&mut self, pragma_mode: bool) -> Result<Option<Token>, ParseError> {
        self.skip_trivia()?;
        let (line, column, start) = (self.line, self.column, self.pos);
        let Some(c) = self.peek() else { return Ok(None) };

        let term = if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$');
            match self.peek() {
                Some('"') | Some('\'') if word == "hex" => {
                    self.string()?;
                    Term::HexLiteral
                }
                Some('"') | Some('\'') if word == "unicode" => {
                    self.string()?;
                    Term::StringLiteral
                }
                _ => match keywords::lookup(word) {
                    Some(kw) => Term::Keyword(kw),
                    None => Term::Identifier,
                },
            }
        } else if pragma_mode && c.is_ascii_digit() {
            self.take_while(|c| c.is_ascii_digit() || c == '.' || c == 'x' || c == 'X' || c == '*');
            Term::VersionLiteral
        } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            self.number()
        } else if c == '"' || c == '\'' {
            self.string()?;
            Term::StringLiteral
        } else {
            let rest = &self.src[self.pos..];
            let Some((sym, _)) = PUNCTUATION.iter().find(|(s, _)| rest.starts_with(s)) else {
                return Err(self.error(format!("unexpected character `{c}`"), &[]));
            };
            for _ in 0..sym.len() {
                self.bump();
            }
            Term::Punct(sym)
        };
        Ok(Some(Token {
            term,
            text: self.src[start..self.pos].to_string(),
            line,
            column,
            end_line: self.line,
        }))
    }

    fn number(&mut self) -> Term {
        if self.peek() == Some('0') && matches!(self.peek_at(1), Some('x') | Some('X')) {
            self.bump();
            self.bump();
            self.take_while(|c| c.is_ascii_hexdigit() || c == '_');
            return Term::HexNumber;
        }
        self.take_while(|c| c.is_ascii_digit() || c == '_');
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
            self.bump();
            self.take_while(|c| c.is_ascii_digit() || c == '_');
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let signed = self.peek_at(1) == Some('-');
            let digit_at = if signed { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                self.bump();
                if signed {
                    self.bump();
                }
                self.take_while(|c| c.is_ascii_digit());
            }
        }
        Term::DecimalNumber
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { src, pos: 0, line: 1, column: 1 };
    let mut tokens: Vec<Token> = Vec::new();
    // 0: normal, 1: saw `pragma`, 2: inside the pragma value.
    let mut pragma_state = 0u8;
    while let Some(tok) = lx.next_token(pragma_state == 2)? {
        pragma_state = match (pragma_state, tok.term) {
            (_, Term::Keyword("pragma")) => 1,
            (1, _) => 2,
            (2, Term::Punct(";")) => 0,
            (s, _) => s,
        };
        tokens.push(tok);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(src: &str) -> Vec<(Term, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.term, t.text)).collect()
    }

    #[test]
    fn pragma_version_is_one_token() {
        let toks = terms("pragma solidity ^0.4.15;");
        assert_eq!(
            toks,
            vec![
                (Term::Keyword("pragma"), "pragma".into()),
                (Term::Identifier, "solidity".into()),
                (Term::Punct("^"), "^".into()),
                (Term::VersionLiteral, "0.4.15".into()),
                (Term::Punct(";"), ";".into()),
            ]
        );
    }

    #[test]
    fn literal_classes() {
        let toks = terms(r#"x0 = 0x1F + 1.5e3 + hex"00ff" + 'a' + "b";"#);
        let classes: Vec<Term> = toks.iter().map(|t| t.0).collect();
        assert_eq!(
            classes,
            vec![
                Term::Identifier,
                Term::Punct("="),
                Term::HexNumber,
                Term::Punct("+"),
                Term::DecimalNumber,
                Term::Punct("+"),
                Term::HexLiteral,
                Term::Punct("+"),
                Term::StringLiteral,
                Term::Punct("+"),
                Term::StringLiteral,
                Term::Punct(";"),
            ]
        );
    }

    #[test]
    fn comments_dropped_lines_kept() {
        let toks = tokenize("a // one\n/* two\nthree */ b").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].line, 1);
        assert_eq!(toks[1].line, 3);
    }

    #[test]
    fn longest_operator_match() {
        let toks = terms("a <<= b >= c => d");
        let ops: Vec<&str> = toks.iter().filter_map(|t| match t.0 {
            Term::Punct(p) => Some(p),
            _ => None,
        }).collect();
        assert_eq!(ops, vec!["<<=", ">=", "=>"]);
    }

    #[test]
    fn elementary_types() {
        assert!(keywords::is_elementary_type("uint256"));
        assert!(keywords::is_elementary_type("bytes32"));
        assert!(keywords::is_elementary_type("address"));
        assert!(!keywords::is_elementary_type("mapping"));
        assert!(!keywords::is_elementary_type("internal"));
    }

    #[test]
    fn unterminated_string_is_syntax_error() {
        let err = tokenize("x = \"abc\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
    }
}
