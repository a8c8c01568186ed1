//! Technology-agnostic intermediate representation.
//!
//! Every frontend lowers its scripts onto the same hierarchy:
//! `Project` > `Module` > `UnitBlock` > `AtomicUnit` > `Attribute`, with
//! `Variable` and `Comment` hanging off unit blocks. Nodes are immutable
//! once a parser hands them out.

mod dump;
mod equiv;
mod traverse;
mod value;

pub use dump::dump_tree;
pub use equiv::{atomic_unit_equivalent, canonical_key, NameMap};
pub use traverse::{traverse, Node, NodeKind};
pub use value::{
    scan_delimited_markers, scan_dollar_markers, Interpolation, StringStyle, StringValue, Value,
};

use crate::source::SourceSpan;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Project {
    pub name: String,
    pub modules: Vec<Module>,
    pub unit_blocks: Vec<UnitBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Module {
    pub name: String,
    pub unit_blocks: Vec<UnitBlock>,
    /// Location of the module folder; `raw_code` is always empty.
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitBlockKind {
    /// A whole file. Only the root block of a parsed file has this kind.
    Script,
    /// Play, conditional branch, case statement, node definition.
    Block,
    BuildStage,
    /// Puppet class or defined type.
    ClassLike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitBlock {
    pub name: String,
    pub kind: UnitBlockKind,
    pub atomic_units: Vec<AtomicUnit>,
    pub variables: Vec<Variable>,
    pub comments: Vec<Comment>,
    pub attributes: Vec<Attribute>,
    pub nested_blocks: Vec<UnitBlock>,
    /// For case / switch blocks: whether a default branch exists. `None` elsewhere.
    pub default_branch: Option<bool>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicUnit {
    pub name: String,
    pub unit_type: String,
    pub attributes: Vec<Attribute>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub value: Value,
    pub nested: Vec<Attribute>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub value: Value,
    pub nested: Vec<Variable>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comment {
    pub text: String,
    pub span: SourceSpan,
}

impl Project {
    pub fn new(name: impl Into<String>) -> Self {
        Project {
            name: name.into(),
            ..Default::default()
        }
    }

    /// File-level unit blocks, modules first.
    pub fn files(&self) -> impl Iterator<Item = &UnitBlock> {
        self.modules
            .iter()
            .flat_map(|m| m.unit_blocks.iter())
            .chain(self.unit_blocks.iter())
    }
}

impl Module {
    pub fn new(name: impl Into<String>, span: SourceSpan) -> Self {
        Module {
            name: name.into(),
            unit_blocks: Vec::new(),
            span,
        }
    }
}

impl UnitBlock {
    pub fn new(name: impl Into<String>, kind: UnitBlockKind, span: SourceSpan) -> Self {
        UnitBlock {
            name: name.into(),
            kind,
            atomic_units: Vec::new(),
            variables: Vec::new(),
            comments: Vec::new(),
            attributes: Vec::new(),
            nested_blocks: Vec::new(),
            default_branch: None,
            span,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atomic_units.is_empty()
            && self.variables.is_empty()
            && self.comments.is_empty()
            && self.attributes.is_empty()
            && self.nested_blocks.is_empty()
    }

    /// Atomic units of this block and all nested blocks, in traversal order.
    pub fn all_atomic_units(&self) -> Vec<&AtomicUnit> {
        let mut out = Vec::new();
        self.collect_units(&mut out);
        out
    }

    fn collect_units<'a>(&'a self, out: &mut Vec<&'a AtomicUnit>) {
        out.extend(self.atomic_units.iter());
        for nested in &self.nested_blocks {
            nested.collect_units(out);
        }
    }

    /// Number of variable declarations in the tree, nested variables included.
    pub fn variable_count(&self) -> usize {
        fn count(vars: &[Variable]) -> usize {
            vars.iter().map(|v| 1 + count(&v.nested)).sum()
        }
        count(&self.variables)
            + self
                .nested_blocks
                .iter()
                .map(UnitBlock::variable_count)
                .sum::<usize>()
    }

    pub fn comment_count(&self) -> usize {
        self.comments.len()
            + self
                .nested_blocks
                .iter()
                .map(UnitBlock::comment_count)
                .sum::<usize>()
    }
}

impl AtomicUnit {
    pub fn new(name: impl Into<String>, unit_type: impl Into<String>, span: SourceSpan) -> Self {
        AtomicUnit {
            name: name.into(),
            unit_type: unit_type.into(),
            attributes: Vec::new(),
            span,
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Adds an attribute unless one with the same name exists. Returns false on a duplicate.
    pub fn push_attribute(&mut self, attr: Attribute) -> bool {
        if self.attribute(&attr.name).is_some() {
            return false;
        }
        self.attributes.push(attr);
        true
    }
}

impl Attribute {
    pub fn new(name: impl Into<String>, value: Value, span: SourceSpan) -> Self {
        Attribute {
            name: name.into(),
            value,
            nested: Vec::new(),
            span,
        }
    }

    pub fn with_nested(name: impl Into<String>, nested: Vec<Attribute>, span: SourceSpan) -> Self {
        Attribute {
            name: name.into(),
            value: Value::Null,
            nested,
            span,
        }
    }
}

impl Variable {
    pub fn new(name: impl Into<String>, value: Value, span: SourceSpan) -> Self {
        Variable {
            name: name.into(),
            value,
            nested: Vec::new(),
            span,
        }
    }

    pub fn with_nested(name: impl Into<String>, nested: Vec<Variable>, span: SourceSpan) -> Self {
        Variable {
            name: name.into(),
            value: Value::Null,
            nested,
            span,
        }
    }
}

impl Comment {
    /// Trims the text; blank comments are dropped.
    pub fn new(text: &str, span: SourceSpan) -> Option<Self> {
        let text = text.trim();
        (!text.is_empty()).then(|| Comment {
            text: text.to_string(),
            span,
        })
    }
}

/// Converts an attribute tree into the equivalent variable tree.
impl From<Attribute> for Variable {
    fn from(a: Attribute) -> Self {
        Variable {
            name: a.name,
            value: a.value,
            nested: a.nested.into_iter().map(Variable::from).collect(),
            span: a.span,
        }
    }
}
