use std::fmt::Write;

use super::{Node, NodeKind};

/// Indented one-line-per-node rendering of an IR tree, for debugging.
pub fn dump_tree<'a>(root: impl Into<Node<'a>>) -> String {
    let mut out = String::new();
    write_node(&mut out, root.into(), 0);
    out
}

fn write_node(out: &mut String, node: Node<'_>, depth: usize) {
    let indent = "  ".repeat(depth);
    let kind = match node.kind() {
        NodeKind::Project => "Project",
        NodeKind::Module => "Module",
        NodeKind::UnitBlock => "UnitBlock",
        NodeKind::AtomicUnit => "AtomicUnit",
        NodeKind::Attribute => "Attribute",
        NodeKind::Variable => "Variable",
        NodeKind::Comment => "Comment",
    };
    let extra = match node {
        Node::AtomicUnit(au) => format!(" type={}", au.unit_type),
        Node::Attribute(a) if a.nested.is_empty() => format!(" = {}", a.value),
        Node::Variable(v) if v.nested.is_empty() => format!(" = {}", v.value),
        Node::UnitBlock(u) => format!(" kind={:?}", u.kind),
        _ => String::new(),
    };
    let location = node.span().map(|s| format!(" @ {s}")).unwrap_or_default();
    let _ = writeln!(out, "{indent}{kind} {:?}{extra}{location}", node.name());
    for child in node.children() {
        write_node(out, child, depth + 1);
    }
}
