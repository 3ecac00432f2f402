use super::{Token, TokenClass, TokenStream};

/// Lowercased constituent words of an identifier. Splits at `_` and `$`,
/// at lower-to-upper humps and at letter/digit boundaries.
pub fn split_name(name: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for c in name.chars() {
        if c == '_' || c == '$' {
            if !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
            }
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            let hump = p.is_lowercase() && c.is_uppercase();
            let digit_edge = p.is_ascii_digit() != c.is_ascii_digit();
            if (hump || digit_edge) && !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
            }
        }
        cur.extend(c.to_lowercase());
        prev = Some(c);
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    parts
}

fn placeholder(class: TokenClass) -> Option<&'static str> {
    Some(match class {
        TokenClass::StringLiteral => "stringliteral",
        TokenClass::DecimalNumber => "decimalnumber",
        TokenClass::HexNumber => "hexnumber",
        TokenClass::HexLiteral => "hexliteral",
        TokenClass::VersionLiteral => "versionliteral",
        _ => return None,
    })
}

fn is_removed(t: &Token) -> bool {
    matches!(t.text.as_str(), "," | ";" | "'" | "\"") && t.class == TokenClass::Punct
}

pub fn normalize_tokens(tokens: &[Token]) -> Vec<Token> {
    let unified = tokens.iter().map(|t| match placeholder(t.class) {
        Some(p) => Token::new(p, TokenClass::Placeholder),
        None => t.clone(),
    });
    let simple = unified.map(|t| {
        if t.class == TokenClass::Identifier && t.text.chars().count() == 1 {
            Token::new("simplevar", TokenClass::Placeholder)
        } else {
            t
        }
    });
    let kept: Vec<Token> = simple.filter(|t| !is_removed(t)).collect();

    let mut out = Vec::with_capacity(kept.len());
    for (i, t) in kept.iter().enumerate() {
        out.push(t.clone());
        if t.class != TokenClass::Identifier {
            continue;
        }
        let parts = split_name(&t.text);
        if parts.len() < 2 {
            continue;
        }
        let already = kept[i + 1..].len() >= parts.len()
            && kept[i + 1..i + 1 + parts.len()]
                .iter()
                .zip(&parts)
                .all(|(k, p)| k.class == TokenClass::NamePart && k.text == *p);
        if !already {
            out.extend(parts.into_iter().map(|p| Token::new(p, TokenClass::NamePart)));
        }
    }
    out
}

pub fn normalize(stream: &TokenStream) -> TokenStream {
    TokenStream { tokens: normalize_tokens(&stream.tokens), ..stream.clone() }
}
