use super::{Attribute, AtomicUnit, Comment, Module, Project, UnitBlock, Variable};
use crate::source::SourceSpan;

/// Borrowed reference to any IR node.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    Project(&'a Project),
    Module(&'a Module),
    UnitBlock(&'a UnitBlock),
    AtomicUnit(&'a AtomicUnit),
    Attribute(&'a Attribute),
    Variable(&'a Variable),
    Comment(&'a Comment),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Project,
    Module,
    UnitBlock,
    AtomicUnit,
    Attribute,
    Variable,
    Comment,
}

impl<'a> Node<'a> {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Project(_) => NodeKind::Project,
            Node::Module(_) => NodeKind::Module,
            Node::UnitBlock(_) => NodeKind::UnitBlock,
            Node::AtomicUnit(_) => NodeKind::AtomicUnit,
            Node::Attribute(_) => NodeKind::Attribute,
            Node::Variable(_) => NodeKind::Variable,
            Node::Comment(_) => NodeKind::Comment,
        }
    }

    pub fn name(&self) -> &'a str {
        match self {
            Node::Project(p) => &p.name,
            Node::Module(m) => &m.name,
            Node::UnitBlock(u) => &u.name,
            Node::AtomicUnit(a) => &a.name,
            Node::Attribute(a) => &a.name,
            Node::Variable(v) => &v.name,
            Node::Comment(c) => &c.text,
        }
    }

    /// Projects carry no span.
    pub fn span(&self) -> Option<&'a SourceSpan> {
        match self {
            Node::Project(_) => None,
            Node::Module(m) => Some(&m.span),
            Node::UnitBlock(u) => Some(&u.span),
            Node::AtomicUnit(a) => Some(&a.span),
            Node::Attribute(a) => Some(&a.span),
            Node::Variable(v) => Some(&v.span),
            Node::Comment(c) => Some(&c.span),
        }
    }

    /// Address of the referenced node; distinct nodes have distinct addresses.
    pub fn address(&self) -> usize {
        match self {
            Node::Project(p) => *p as *const Project as usize,
            Node::Module(m) => *m as *const Module as usize,
            Node::UnitBlock(u) => *u as *const UnitBlock as usize,
            Node::AtomicUnit(a) => *a as *const AtomicUnit as usize,
            Node::Attribute(a) => *a as *const Attribute as usize,
            Node::Variable(v) => *v as *const Variable as usize,
            Node::Comment(c) => *c as *const Comment as usize,
        }
    }

    /// Children in fixed field order.
    pub fn children(&self) -> Vec<Node<'a>> {
        match *self {
            Node::Project(p) => p
                .modules
                .iter()
                .map(Node::Module)
                .chain(p.unit_blocks.iter().map(Node::UnitBlock))
                .collect(),
            Node::Module(m) => m.unit_blocks.iter().map(Node::UnitBlock).collect(),
            Node::UnitBlock(u) => u
                .atomic_units
                .iter()
                .map(Node::AtomicUnit)
                .chain(u.variables.iter().map(Node::Variable))
                .chain(u.comments.iter().map(Node::Comment))
                .chain(u.attributes.iter().map(Node::Attribute))
                .chain(u.nested_blocks.iter().map(Node::UnitBlock))
                .collect(),
            Node::AtomicUnit(a) => a.attributes.iter().map(Node::Attribute).collect(),
            Node::Attribute(a) => a.nested.iter().map(Node::Attribute).collect(),
            Node::Variable(v) => v.nested.iter().map(Node::Variable).collect(),
            Node::Comment(_) => Vec::new(),
        }
    }
}

impl<'a> From<&'a Project> for Node<'a> {
    fn from(p: &'a Project) -> Self {
        Node::Project(p)
    }
}

impl<'a> From<&'a Module> for Node<'a> {
    fn from(m: &'a Module) -> Self {
        Node::Module(m)
    }
}

impl<'a> From<&'a UnitBlock> for Node<'a> {
    fn from(u: &'a UnitBlock) -> Self {
        Node::UnitBlock(u)
    }
}

/// Pre-order depth-first walk. Each collection of a node is visited as its
/// children, in field order: modules, unit blocks, atomic units, variables,
/// comments, attributes, nested blocks, nested attributes / variables.
pub fn traverse<'a>(root: impl Into<Node<'a>>) -> Vec<Node<'a>> {
    let mut out = Vec::new();
    let mut stack = vec![root.into()];
    while let Some(node) = stack.pop() {
        let children = node.children();
        out.push(node);
        stack.extend(children.into_iter().rev());
    }
    out
}
