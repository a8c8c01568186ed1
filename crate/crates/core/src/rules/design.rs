//! Design and implementation smells.

use std::collections::BTreeMap;

use super::line_span;
use crate::config::AnalysisConfig;
use crate::engine::Detector;
use crate::ir::{canonical_key, AtomicUnit, Attribute, Comment, NameMap, StringStyle, UnitBlock, UnitBlockKind, Value, Variable};
use crate::parser::TechnologyId;
use crate::shell;
use crate::smell::{Smell, SmellCode};
use crate::source::SourceSpan;

pub fn detectors(tech: TechnologyId) -> Vec<Box<dyn Detector>> {
    vec![
        Box::new(AvoidComments),
        Box::new(DuplicateBlock),
        Box::new(ImproperAlignment::for_tech(tech)),
        Box::new(LongResource),
        Box::new(LongStatement),
        Box::new(MisplacedAttribute { tech }),
        Box::new(MultifacetedAbstraction::for_tech(tech)),
        Box::new(TooManyVariables),
        Box::new(UnguardedVariable { tech }),
    ]
}

/// Attributes whose value is a shell command line, per technology.
pub fn command_attributes(tech: TechnologyId) -> &'static [&'static str] {
    match tech {
        TechnologyId::Docker => &["args", "command"],
        _ => &["command", "cmd", "onlyif", "unless", "not_if", "only_if"],
    }
}

pub struct AvoidComments;

impl Detector for AvoidComments {
    fn code(&self) -> SmellCode {
        SmellCode::AvoidComments
    }

    fn check_comment(&self, node: &Comment, _cfg: &AnalysisConfig) -> Vec<Smell> {
        vec![Smell::new(self.code(), node.span.clone(), "comment")]
    }
}

/// Lines over the configured length, measured in characters without the newline.
pub struct LongStatement;

impl LongStatement {
    pub fn is_long(length: usize, cfg: &AnalysisConfig) -> bool {
        if cfg.long_statement_inclusive {
            length >= cfg.long_statement_max
        } else {
            length > cfg.long_statement_max
        }
    }
}

impl Detector for LongStatement {
    fn code(&self) -> SmellCode {
        SmellCode::LongStatement
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["long_statement_max", "long_statement_inclusive"]
    }

    fn check_unit_block(&self, node: &UnitBlock, cfg: &AnalysisConfig) -> Vec<Smell> {
        if node.kind != UnitBlockKind::Script {
            return Vec::new();
        }
        node.span
            .raw_code
            .split('\n')
            .enumerate()
            .filter_map(|(i, line)| {
                let length = line.chars().count();
                Self::is_long(length, cfg).then(|| {
                    Smell::new(
                        self.code(),
                        line_span(&node.span, node.span.start_line + i),
                        format!("line has {length} characters"),
                    )
                })
            })
            .collect()
    }
}

pub struct LongResource;

impl Detector for LongResource {
    fn code(&self) -> SmellCode {
        SmellCode::LongResource
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["long_resource_max_lines"]
    }

    fn check_atomic_unit(&self, node: &AtomicUnit, cfg: &AnalysisConfig) -> Vec<Smell> {
        let lines = node.span.line_count();
        if lines > cfg.long_resource_max_lines {
            vec![Smell::new(self.code(), node.span.clone(), format!("{} spans {lines} lines", node.unit_type))]
        } else {
            Vec::new()
        }
    }
}

/// Declared variables per non-blank line of a file.
pub struct TooManyVariables;

impl Detector for TooManyVariables {
    fn code(&self) -> SmellCode {
        SmellCode::TooManyVariables
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["too_many_vars_ratio"]
    }

    fn check_unit_block(&self, node: &UnitBlock, cfg: &AnalysisConfig) -> Vec<Smell> {
        if node.kind != UnitBlockKind::Script {
            return Vec::new();
        }
        let lines = node.span.raw_code.split('\n').filter(|l| !l.trim().is_empty()).count();
        let vars = node.variable_count();
        if lines == 0 || (vars as f64 / lines as f64) <= cfg.too_many_vars_ratio {
            return Vec::new();
        }
        let span = line_span(&node.span, node.span.start_line);
        vec![Smell::new(self.code(), span, format!("{vars} variables in {lines} lines"))]
    }
}

/// Structurally equal atomic units (titles ignored) within one file.
pub struct DuplicateBlock;

impl Detector for DuplicateBlock {
    fn code(&self) -> SmellCode {
        SmellCode::DuplicateBlock
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["duplicate_min_attrs"]
    }

    fn check_unit_block(&self, node: &UnitBlock, cfg: &AnalysisConfig) -> Vec<Smell> {
        if node.kind != UnitBlockKind::Script {
            return Vec::new();
        }
        let map = NameMap::identity();
        let mut groups: BTreeMap<_, Vec<&AtomicUnit>> = BTreeMap::new();
        for unit in node.all_atomic_units() {
            if unit.attributes.len() >= cfg.duplicate_min_attrs {
                groups.entry(canonical_key(unit, true, &map)).or_default().push(unit);
            }
        }
        groups
            .into_values()
            .filter(|g| g.len() > 1)
            .flat_map(|group| {
                let size = group.len();
                group.into_iter().map(move |u| {
                    Smell::new(self.code(), u.span.clone(), format!("{} duplicated {size} times", u.unit_type))
                })
            })
            .collect()
    }
}

/// Attribute names must follow the configured precedence list; names not in
/// the list rank after every listed name.
pub struct MisplacedAttribute {
    tech: TechnologyId,
}

impl MisplacedAttribute {
    pub fn is_ordered(names: &[&str], order: &[String]) -> bool {
        let rank = |n: &str| {
            let n = n.to_lowercase();
            order.iter().position(|o| *o == n).unwrap_or(order.len())
        };
        names.windows(2).all(|w| rank(w[0]) <= rank(w[1]))
    }
}

impl Detector for MisplacedAttribute {
    fn code(&self) -> SmellCode {
        SmellCode::MisplacedAttribute
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &[
            "misplaced_order_ansible",
            "misplaced_order_chef",
            "misplaced_order_docker",
            "misplaced_order_puppet",
            "misplaced_order_terraform",
        ]
    }

    fn check_atomic_unit(&self, node: &AtomicUnit, cfg: &AnalysisConfig) -> Vec<Smell> {
        let order = cfg.misplaced_order(self.tech);
        let names: Vec<&str> = node.attributes.iter().map(|a| a.name.as_str()).collect();
        if order.is_empty() || Self::is_ordered(&names, order) {
            return Vec::new();
        }
        let span = line_span(&node.span, node.span.start_line);
        vec![Smell::new(self.code(), span, format!("expected order: {}", order.join(", ")))]
    }
}

/// More than one shell statement in a single command attribute.
pub struct MultifacetedAbstraction {
    attributes: &'static [&'static str],
}

impl MultifacetedAbstraction {
    pub fn for_tech(tech: TechnologyId) -> Self {
        MultifacetedAbstraction {
            attributes: command_attributes(tech),
        }
    }
}

impl Detector for MultifacetedAbstraction {
    fn code(&self) -> SmellCode {
        SmellCode::MultifacetedAbstraction
    }

    fn check_atomic_unit(&self, node: &AtomicUnit, _cfg: &AnalysisConfig) -> Vec<Smell> {
        let worst = node
            .attributes
            .iter()
            .filter(|a| self.attributes.contains(&a.name.as_str()))
            .filter_map(|a| a.value.as_str())
            .map(|s| shell::statement_count(&s.text))
            .max()
            .unwrap_or(0);
        if worst > 1 {
            let span = line_span(&node.span, node.span.start_line);
            vec![Smell::new(self.code(), span, format!("command runs {worst} statements"))]
        } else {
            Vec::new()
        }
    }
}

/// How attribute layout is judged for one technology.
pub trait AlignmentStrategy: Send + Sync {
    /// Whether the attribute lines of `unit` are misaligned.
    fn misaligned(&self, unit: &AtomicUnit, cfg: &AnalysisConfig) -> bool;
}

/// An attribute line: the attribute name is the first thing on its line.
struct AttributeLine<'a> {
    attr: &'a Attribute,
    indent: &'a str,
    /// Text after the indentation.
    rest: &'a str,
}

fn attribute_lines<'a>(unit: &'a AtomicUnit) -> Vec<AttributeLine<'a>> {
    let lines: Vec<&str> = unit.span.raw_code.split('\n').collect();
    let mut seen_lines = Vec::new();
    let mut out = Vec::new();
    for attr in &unit.attributes {
        let line_no = attr.span.start_line;
        if line_no < unit.span.start_line || seen_lines.contains(&line_no) {
            continue;
        }
        seen_lines.push(line_no);
        let Some(line) = lines.get(line_no - unit.span.start_line) else {
            continue;
        };
        let rest = line.trim_start();
        let starts_with_name = rest.strip_prefix(attr.name.as_str()).is_some_and(|after| {
            after.is_empty() || after.starts_with(|c: char| c.is_whitespace() || matches!(c, '=' | ':' | '+' | '(' | '{'))
        });
        if starts_with_name {
            out.push(AttributeLine {
                attr,
                indent: &line[..line.len() - rest.len()],
                rest,
            });
        }
    }
    out
}

/// Arrows one gap past the longest attribute name, with equal indentation.
pub struct ArrowAlignment;

impl AlignmentStrategy for ArrowAlignment {
    fn misaligned(&self, unit: &AtomicUnit, cfg: &AnalysisConfig) -> bool {
        let width = unit.attributes.iter().map(|a| a.name.chars().count()).max().unwrap_or(0);
        let lines: Vec<_> = attribute_lines(unit)
            .into_iter()
            .filter(|l| !matches!(&l.attr.value, Value::Str(s) if s.style == StringStyle::Hash))
            .collect();
        if lines.windows(2).any(|w| w[0].indent != w[1].indent) {
            return true;
        }
        lines.iter().any(|l| {
            let after_name = &l.rest[l.attr.name.len()..];
            let Some(arrow) = after_name.find("=>").or_else(|| after_name.find("+>")) else {
                return false;
            };
            let column = l.indent.chars().count()
                + l.attr.name.chars().count()
                + after_name[..arrow].chars().count();
            column != l.indent.chars().count() + width + cfg.alignment_gap
        })
    }
}

/// Attribute lines indented by the same number of spaces, without tabs.
pub struct IndentAlignment;

impl AlignmentStrategy for IndentAlignment {
    fn misaligned(&self, unit: &AtomicUnit, _cfg: &AnalysisConfig) -> bool {
        let lines = attribute_lines(unit);
        lines.iter().any(|l| l.indent.contains('\t'))
            || lines.windows(2).any(|w| w[0].indent.len() != w[1].indent.len())
    }
}

pub struct ImproperAlignment {
    strategy: Box<dyn AlignmentStrategy>,
}

impl ImproperAlignment {
    pub fn for_tech(tech: TechnologyId) -> Self {
        let strategy: Box<dyn AlignmentStrategy> = match tech {
            TechnologyId::Puppet => Box::new(ArrowAlignment),
            _ => Box::new(IndentAlignment),
        };
        ImproperAlignment { strategy }
    }
}

impl Detector for ImproperAlignment {
    fn code(&self) -> SmellCode {
        SmellCode::ImproperAlignment
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["alignment_gap"]
    }

    fn check_atomic_unit(&self, node: &AtomicUnit, cfg: &AnalysisConfig) -> Vec<Smell> {
        if self.strategy.misaligned(node, cfg) {
            let span = line_span(&node.span, node.span.start_line);
            vec![Smell::new(self.code(), span, "attributes are not aligned")]
        } else {
            Vec::new()
        }
    }
}

/// `$name` rather than `${name}` inside a double-quoted string.
pub struct UnguardedVariable {
    tech: TechnologyId,
}

impl UnguardedVariable {
    fn check(&self, value: &Value, span: &SourceSpan, cfg: &AnalysisConfig) -> Vec<Smell> {
        if !cfg.unguarded_variable_enabled(self.tech) {
            return Vec::new();
        }
        let Value::Str(s) = value else {
            return Vec::new();
        };
        if s.style != StringStyle::DoubleQuoted {
            return Vec::new();
        }
        s.interpolations
            .iter()
            .filter(|m| !m.guarded)
            .map(|m| {
                let line = (span.start_line + s.text[..m.start].matches('\n').count()).min(span.end_line);
                Smell::new(
                    SmellCode::UnguardedVariable,
                    line_span(span, line),
                    format!("unguarded reference {}", s.marker_text(m)),
                )
            })
            .collect()
    }
}

impl Detector for UnguardedVariable {
    fn code(&self) -> SmellCode {
        SmellCode::UnguardedVariable
    }

    fn config_keys(&self) -> &'static [&'static str] {
        &["unguarded_variable_techs"]
    }

    fn check_attribute(&self, node: &Attribute, cfg: &AnalysisConfig) -> Vec<Smell> {
        self.check(&node.value, &node.span, cfg)
    }

    fn check_variable(&self, node: &Variable, cfg: &AnalysisConfig) -> Vec<Smell> {
        self.check(&node.value, &node.span, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, DetectorSet};
    use crate::parser::parse_source;

    fn smells(tech: TechnologyId, src: &str, cfg: &AnalysisConfig) -> Vec<(usize, SmellCode)> {
        let ub = parse_source("t", src, tech).unwrap().block;
        run(&ub, &DetectorSet::for_family(crate::smell::SmellFamily::Design, tech), cfg)
            .into_iter()
            .map(|s| (s.line(), s.code))
            .collect()
    }

    fn only(tech: TechnologyId, src: &str, code: SmellCode) -> Vec<usize> {
        smells(tech, src, &AnalysisConfig::default())
            .into_iter()
            .filter(|(_, c)| *c == code)
            .map(|(l, _)| l)
            .collect()
    }

    #[test]
    fn long_statement_comparators() {
        let line = "x".repeat(140);
        let mut cfg = AnalysisConfig::default();
        let count = |cfg: &AnalysisConfig, text: &str| {
            smells(TechnologyId::Puppet, text, cfg)
                .iter()
                .filter(|(_, c)| *c == SmellCode::LongStatement)
                .count()
        };
        let src = format!("# {}\n", &line[2..]);
        assert_eq!(count(&cfg, &src), 0);
        cfg.long_statement_inclusive = true;
        assert_eq!(count(&cfg, &src), 1);
        let cfg = AnalysisConfig::default();
        assert_eq!(count(&cfg, &format!("# {}\n", "y".repeat(139))), 1);
        assert_eq!(count(&cfg, &format!("# {}\n", "y".repeat(137))), 0);
    }

    #[test]
    fn puppet_arrow_alignment() {
        let good = "file { '/x':\n  ensure => file,\n  mode   => '0644',\n  owner  => root,\n}\n";
        assert!(only(TechnologyId::Puppet, good, SmellCode::ImproperAlignment).is_empty());
        let bad = "file { '/x':\n  ensure  => file,\n  mode    => '0644',\n}\n";
        assert_eq!(only(TechnologyId::Puppet, bad, SmellCode::ImproperAlignment), vec![1]);
        let indent = "file { '/x':\n  ensure => file,\n   mode  => '0644',\n}\n";
        assert_eq!(only(TechnologyId::Puppet, indent, SmellCode::ImproperAlignment), vec![1]);
    }

    #[test]
    fn tab_indented_ansible_attribute() {
        let src = "- name: x\n  file: {\n    path: /tmp/a,\n    \tmode: '0777'}\n";
        assert_eq!(only(TechnologyId::Ansible, src, SmellCode::ImproperAlignment), vec![1]);
    }

    #[test]
    fn misplaced_ensure() {
        let first = "file { '/x':\n  ensure => file,\n  mode   => '0644',\n}\n";
        assert!(only(TechnologyId::Puppet, first, SmellCode::MisplacedAttribute).is_empty());
        let second = "file { '/x':\n  mode   => '0644',\n  ensure => file,\n}\n";
        assert_eq!(only(TechnologyId::Puppet, second, SmellCode::MisplacedAttribute), vec![1]);
        let none = "file { '/x':\n  mode => '0644',\n}\n";
        assert!(only(TechnologyId::Puppet, none, SmellCode::MisplacedAttribute).is_empty());
    }

    #[test]
    fn multifaceted_commands() {
        let pipe = "exec { 'x':\n  command => \"mysql -e 'x' | grep y\",\n}\n";
        assert_eq!(only(TechnologyId::Puppet, pipe, SmellCode::MultifacetedAbstraction), vec![1]);
        let single = "exec { 'x':\n  command => 'ls',\n}\n";
        assert!(only(TechnologyId::Puppet, single, SmellCode::MultifacetedAbstraction).is_empty());
        let multi = "exec { 'x':\n  command => \"service x stop\n    && restart\",\n}\n";
        assert_eq!(only(TechnologyId::Puppet, multi, SmellCode::MultifacetedAbstraction), vec![1]);
    }

    #[test]
    fn too_many_variables_boundary() {
        let four = "$a = 1\n$b = 2\n$c = 3\n$d = 4\n# 5\n# 6\n# 7\n# 8\n# 9\n# 10\n";
        assert_eq!(only(TechnologyId::Puppet, four, SmellCode::TooManyVariables), vec![1]);
        let three = "$a = 1\n$b = 2\n$c = 3\n# 4\n# 5\n# 6\n# 7\n# 8\n# 9\n# 10\n";
        assert!(only(TechnologyId::Puppet, three, SmellCode::TooManyVariables).is_empty());
    }

    #[test]
    fn duplicates_report_every_member() {
        let src = "exec { 'a':\n  command => 'x',\n  user    => 'y',\n}\nexec { 'b':\n  command => 'x',\n  user    => 'y',\n}\n";
        assert_eq!(only(TechnologyId::Puppet, src, SmellCode::DuplicateBlock), vec![1, 5]);
    }

    #[test]
    fn unguarded_variables() {
        let src = "notify { 'x':\n  message => \"Hello $user\",\n}\n";
        assert_eq!(only(TechnologyId::Puppet, src, SmellCode::UnguardedVariable), vec![2]);
        let guarded = "notify { 'x':\n  message => \"Hello ${user}\",\n}\n";
        assert!(only(TechnologyId::Puppet, guarded, SmellCode::UnguardedVariable).is_empty());
        let single = "notify { 'x':\n  message => 'costs $5',\n}\n";
        assert!(only(TechnologyId::Puppet, single, SmellCode::UnguardedVariable).is_empty());
    }

    #[test]
    fn long_resource_threshold() {
        let body: String = (0..11).map(|i| format!("  a{i} => 1,\n")).collect();
        let thirteen = format!("file {{ 'x':\n{body}}}\n");
        assert_eq!(only(TechnologyId::Puppet, &thirteen, SmellCode::LongResource), vec![1]);
        let body: String = (0..10).map(|i| format!("  a{i} => 1,\n")).collect();
        let twelve = format!("file {{ 'x':\n{body}}}\n");
        assert!(only(TechnologyId::Puppet, &twelve, SmellCode::LongResource).is_empty());
    }
}
