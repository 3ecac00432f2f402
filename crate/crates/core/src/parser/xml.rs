//! XML form of a parse tree.
//!
//! Every element is named after its node kind and carries `line_start` and
//! `line_end` attributes. Terminals hold their token text; non-terminals put
//! each child on its own line, indented two spaces per level.

use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::tree::{NodeKind, ParseNode, ParseTree, Rule, Term};
use super::ParseError;

pub fn export_xml(tree: &ParseTree) -> String {
    let mut out = String::new();
    write_node(&tree.root, 0, &mut out);
    out
}

/// Serializes a single subtree.
pub fn export_node(node: &ParseNode) -> String {
    let mut out = String::new();
    write_node(node, 0, &mut out);
    out
}

fn write_node(node: &ParseNode, depth: usize, out: &mut String) {
    let name = node.kind.name();
    out.push_str(&"  ".repeat(depth));
    out.push_str(&format!(
        "<{name} line_start=\"{}\" line_end=\"{}\">",
        node.line_start, node.line_end
    ));
    if node.is_terminal() {
        out.push_str(&escape(node.text()));
    } else if !node.children.is_empty() {
        out.push('\n');
        for c in &node.children {
            write_node(c, depth + 1, out);
            out.push('\n');
        }
        out.push_str(&"  ".repeat(depth));
    }
    out.push_str(&format!("</{name}>"));
}

struct Open {
    kind: NodeKind,
    line_start: u32,
    line_end: u32,
    children: Vec<ParseNode>,
    text: String,
}

fn malformed(msg: impl Into<String>) -> ParseError {
    ParseError::Xml(msg.into())
}

fn kind_of(name: &str) -> Result<NodeKind, ParseError> {
    if let Some(r) = Rule::from_name(name) {
        Ok(NodeKind::Rule(r))
    } else if let Some(t) = Term::from_name(name) {
        Ok(NodeKind::Terminal(t))
    } else {
        Err(malformed(format!("unknown element `{name}`")))
    }
}

/// Rebuilds a tree from [`export_xml`] output.
pub fn import_xml(xml: &str) -> Result<ParseTree, ParseError> {
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<Open> = Vec::new();
    let mut root = None;
    loop {
        match reader.read_event().map_err(|e| malformed(e.to_string()))? {
            Event::Start(e) => {
                let name = std::str::from_utf8(e.name().as_ref())
                    .map_err(|e| malformed(e.to_string()))?
                    .to_string();
                let kind = kind_of(&name)?;
                let (mut ls, mut le) = (None, None);
                for attr in e.attributes() {
                    let attr = attr.map_err(|e| malformed(e.to_string()))?;
                    let value: u32 = attr
                        .unescape_value()
                        .map_err(|e| malformed(e.to_string()))?
                        .parse()
                        .map_err(|_| malformed(format!("bad line attribute on `{name}`")))?;
                    match attr.key.as_ref() {
                        b"line_start" => ls = Some(value),
                        b"line_end" => le = Some(value),
                        _ => return Err(malformed(format!("unexpected attribute on `{name}`"))),
                    }
                }
                let (Some(line_start), Some(line_end)) = (ls, le) else {
                    return Err(malformed(format!("`{name}` lacks line attributes")));
                };
                stack.push(Open { kind, line_start, line_end, children: Vec::new(), text: String::new() });
            }
            Event::Text(t) => {
                let text = t.unescape().map_err(|e| malformed(e.to_string()))?;
                match stack.last_mut() {
                    Some(open) if matches!(open.kind, NodeKind::Terminal(_)) => open.text.push_str(&text),
                    _ if text.trim().is_empty() => {}
                    _ => return Err(malformed("text outside a terminal element")),
                }
            }
            Event::End(_) => {
                let open = stack.pop().ok_or_else(|| malformed("unbalanced end tag"))?;
                let node = ParseNode {
                    kind: open.kind,
                    token_text: matches!(open.kind, NodeKind::Terminal(_)).then_some(open.text),
                    children: open.children,
                    line_start: open.line_start,
                    line_end: open.line_end,
                };
                match stack.last_mut() {
                    Some(parent) => {
                        if matches!(parent.kind, NodeKind::Terminal(_)) {
                            return Err(malformed("terminal element with children"));
                        }
                        parent.children.push(node);
                    }
                    None => {
                        if root.is_some() {
                            return Err(malformed("multiple root elements"));
                        }
                        root = Some(node);
                    }
                }
            }
            Event::Eof => break,
            Event::Empty(_) => return Err(malformed("self-closing element")),
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(malformed("unclosed element"));
    }
    let root = root.ok_or_else(|| malformed("no root element"))?;
    if !root.is_rule(Rule::SourceUnit) {
        return Err(malformed("root element is not sourceUnit"));
    }
    root.check_invariants().map_err(malformed)?;
    Ok(ParseTree { root })
}
