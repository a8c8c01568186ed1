//! Ansible playbooks, task lists and variable files.
//!
//! YAML is read as an event stream so every node keeps its line numbers. A
//! root sequence holds plays (items with `hosts` or `import_playbook`) or
//! tasks; a root mapping is a variables file.

use yaml_rust2::parser::{Event, Parser as YamlParser};
use yaml_rust2::scanner::{Marker, TScalarStyle};

use super::{attach_comments, warning, Parsed, Parser, TechnologyId};
use crate::error::SyntaxError;
use crate::ir::{
    scan_delimited_markers, AtomicUnit, Attribute, Comment, StringStyle, StringValue, UnitBlock,
    UnitBlockKind, Value, Variable,
};
use crate::shell;
use crate::source::SourceText;

pub struct AnsibleParser;

/// Task keys that configure how a task runs rather than what its module does.
const TASK_KEYWORDS: &[&str] = &[
    "any_errors_fatal", "args", "async", "become", "become_exe", "become_flags", "become_method",
    "become_user", "changed_when", "check_mode", "collections", "connection", "debugger", "delay",
    "delegate_facts", "delegate_to", "diff", "environment", "failed_when", "ignore_errors",
    "ignore_unreachable", "loop", "loop_control", "module_defaults", "name", "no_log", "notify",
    "poll", "port", "register", "remote_user", "retries", "run_once", "tags", "throttle",
    "timeout", "until", "vars", "when", "listen",
];

/// Modules whose scalar argument is a command line.
const COMMAND_MODULES: &[&str] = &["shell", "command", "raw", "script", "win_shell", "win_command"];

const TASK_LISTS: &[&str] = &["pre_tasks", "tasks", "post_tasks", "handlers"];

impl Parser for AnsibleParser {
    fn technology(&self) -> TechnologyId {
        TechnologyId::Ansible
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        let src = SourceText::new(path, source);
        let events = events(source)?;
        let mut builder = TreeBuilder {
            src: &src,
            events: &events,
            pos: 0,
        };
        let documents = builder.documents();
        let mut lower = Lowering {
            src: &src,
            warnings: Vec::new(),
        };
        let mut root = UnitBlock::new(path, UnitBlockKind::Script, src.whole());
        for doc in &documents {
            lower.document(doc, &mut root);
        }
        attach_comments(&mut root, comments(&src));
        Ok(Parsed {
            block: root,
            warnings: lower.warnings,
        })
    }
}

fn events(source: &str) -> Result<Vec<(Event, Marker)>, SyntaxError> {
    let mut parser = YamlParser::new_from_str(source);
    let mut out = Vec::new();
    loop {
        let (event, mark) = parser
            .next_token()
            .map_err(|e| SyntaxError::new(e.marker().line().max(1), e.info().to_string()))?;
        let done = event == Event::StreamEnd;
        out.push((event, mark));
        if done {
            return Ok(out);
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Scalar {
        text: String,
        style: TScalarStyle,
        line: usize,
        end: usize,
    },
    Seq {
        items: Vec<Node>,
        line: usize,
        end: usize,
    },
    Map {
        entries: Vec<(Node, Node)>,
        line: usize,
        end: usize,
    },
    Alias {
        line: usize,
    },
}

impl Node {
    fn line(&self) -> usize {
        match self {
            Node::Scalar { line, .. }
            | Node::Seq { line, .. }
            | Node::Map { line, .. }
            | Node::Alias { line } => *line,
        }
    }

    fn end(&self) -> usize {
        match self {
            Node::Scalar { end, .. } | Node::Seq { end, .. } | Node::Map { end, .. } => *end,
            Node::Alias { line } => *line,
        }
    }

    fn as_key(&self) -> String {
        match self {
            Node::Scalar { text, .. } => text.clone(),
            _ => String::new(),
        }
    }

    fn get(&self, key: &str) -> Option<&Node> {
        match self {
            Node::Map { entries, .. } => entries.iter().find(|(k, _)| k.as_key() == key).map(|(_, v)| v),
            _ => None,
        }
    }
}

struct TreeBuilder<'a> {
    src: &'a SourceText<'a>,
    events: &'a [(Event, Marker)],
    pos: usize,
}

impl TreeBuilder<'_> {
    fn documents(&mut self) -> Vec<Node> {
        let mut docs = Vec::new();
        while let Some((event, _)) = self.events.get(self.pos) {
            match event {
                Event::StreamStart | Event::DocumentStart | Event::DocumentEnd | Event::Nothing => {
                    self.pos += 1
                }
                Event::StreamEnd => break,
                _ => docs.push(self.node()),
            }
        }
        docs
    }

    /// Last line of content before the event at `next`, skipping blank and comment lines.
    fn end_before(&self, next: usize, start: usize) -> usize {
        let next_line = self
            .events
            .get(next)
            .map_or(self.src.line_count() + 1, |(_, m)| m.line());
        let mut end = next_line.saturating_sub(1);
        while end > start {
            let t = self.src.line(end).trim();
            if t.is_empty() || t.starts_with('#') || t == "---" || t == "..." {
                end -= 1;
            } else {
                break;
            }
        }
        end.max(start)
    }

    /// Last line of a block scalar whose body starts at `start`: anything
    /// indented less than the body is outside it.
    fn block_scalar_end(&self, next: usize, start: usize) -> usize {
        let indent_of = |l: &str| l.len() - l.trim_start().len();
        let body_indent = indent_of(self.src.line(start));
        let next_line = self
            .events
            .get(next)
            .map_or(self.src.line_count() + 1, |(_, m)| m.line());
        let mut end = next_line.saturating_sub(1);
        while end > start {
            let l = self.src.line(end);
            if l.trim().is_empty() || indent_of(l) < body_indent {
                end -= 1;
            } else {
                break;
            }
        }
        end.max(start)
    }

    /// Whether the collection closed at `mark` was written in flow style.
    fn closes_flow(&self, mark: &Marker, bracket: char) -> bool {
        self.src.line(mark.line()).chars().nth(mark.col()) == Some(bracket)
    }

    fn node(&mut self) -> Node {
        let (event, mark) = self.events[self.pos].clone();
        self.pos += 1;
        let line = mark.line().max(1);
        match event {
            Event::Scalar(text, style, _, _) => {
                let end = self.end_before(self.pos, line);
                let end = match style {
                    TScalarStyle::Plain if !text.contains(' ') && !text.contains('\n') => line,
                    TScalarStyle::Literal | TScalarStyle::Folded => self.block_scalar_end(self.pos, line),
                    _ => end,
                };
                Node::Scalar { text, style, line, end }
            }
            Event::SequenceStart(..) => {
                let mut items = Vec::new();
                while !matches!(self.events.get(self.pos), Some((Event::SequenceEnd, _)) | None) {
                    items.push(self.node());
                }
                let close = self.events.get(self.pos).map(|(_, m)| *m);
                self.pos += 1;
                let end = match close {
                    Some(m) if self.closes_flow(&m, ']') => m.line(),
                    _ => items.last().map_or(line, Node::end),
                };
                Node::Seq { items, line, end }
            }
            Event::MappingStart(..) => {
                let mut entries = Vec::new();
                while !matches!(self.events.get(self.pos), Some((Event::MappingEnd, _)) | None) {
                    let key = self.node();
                    let value = if matches!(self.events.get(self.pos), Some((Event::MappingEnd, _)) | None) {
                        Node::Scalar {
                            text: String::new(),
                            style: TScalarStyle::Plain,
                            line: key.line(),
                            end: key.line(),
                        }
                    } else {
                        self.node()
                    };
                    entries.push((key, value));
                }
                let close = self.events.get(self.pos).map(|(_, m)| *m);
                self.pos += 1;
                let end = match close {
                    Some(m) if self.closes_flow(&m, '}') => m.line(),
                    _ => entries.last().map_or(line, |(k, v)| v.end().max(k.end())),
                };
                Node::Map { entries, line, end }
            }
            _ => Node::Alias { line },
        }
    }
}

fn value_of(node: &Node) -> Value {
    match node {
        Node::Scalar { text, style, .. } => scalar_value(text, *style),
        Node::Seq { items, .. } => Value::List(items.iter().map(value_of).collect()),
        Node::Map { .. } => Value::string("", StringStyle::Hash),
        Node::Alias { .. } => Value::string("*", StringStyle::Expression),
    }
}

fn scalar_value(text: &str, style: TScalarStyle) -> Value {
    let style = match style {
        TScalarStyle::Plain => {
            match text {
                "" | "~" | "null" | "Null" | "NULL" => return Value::Null,
                "true" | "True" | "TRUE" | "yes" | "Yes" | "YES" => return Value::Bool(true),
                "false" | "False" | "FALSE" | "no" | "No" | "NO" => return Value::Bool(false),
                _ => {}
            }
            if let Ok(i) = text.parse::<i64>() {
                return Value::Int(i);
            }
            if text.contains('.') && text.parse::<f64>().is_ok_and(f64::is_finite) {
                return Value::Float(text.parse().unwrap());
            }
            StringStyle::Bare
        }
        TScalarStyle::SingleQuoted => StringStyle::SingleQuoted,
        TScalarStyle::DoubleQuoted => StringStyle::DoubleQuoted,
        _ => StringStyle::Block,
    };
    let markers = scan_delimited_markers(text, "{{", "}}");
    Value::Str(StringValue::new(text, style).with_interpolations(markers))
}

struct Lowering<'s> {
    src: &'s SourceText<'s>,
    warnings: Vec<String>,
}

impl Lowering<'_> {
    fn warn(&mut self, line: usize, message: impl std::fmt::Display) {
        self.warnings.push(warning(self.src.path(), line, message));
    }

    fn document(&mut self, doc: &Node, root: &mut UnitBlock) {
        match doc {
            Node::Seq { items, .. } => {
                for item in items {
                    let is_play = item.get("hosts").is_some()
                        || item.get("import_playbook").is_some()
                        || item.get("ansible.builtin.import_playbook").is_some();
                    if is_play {
                        let play = self.play(item);
                        root.nested_blocks.push(play);
                    } else {
                        self.task(item, root);
                    }
                }
            }
            Node::Map { entries, .. } => {
                for (k, v) in entries {
                    root.variables.push(self.variable(k, v));
                }
            }
            Node::Scalar { text, line, .. } if !text.is_empty() => {
                self.warn(*line, "top-level scalar ignored");
            }
            _ => {}
        }
    }

    fn play(&mut self, node: &Node) -> UnitBlock {
        let name = node
            .get("name")
            .or_else(|| node.get("hosts"))
            .map(|n| value_of(n).text())
            .unwrap_or_default();
        let mut play = UnitBlock::new(name, UnitBlockKind::Block, self.src.span(node.line(), node.end()));
        let Node::Map { entries, .. } = node else {
            return play;
        };
        for (k, v) in entries {
            let key = k.as_key();
            if key == "vars" {
                if let Node::Map { entries, .. } = v {
                    for (vk, vv) in entries {
                        play.variables.push(self.variable(vk, vv));
                    }
                }
            } else if TASK_LISTS.contains(&key.as_str()) {
                if let Node::Seq { items, .. } = v {
                    for item in items {
                        self.task(item, &mut play);
                    }
                }
            } else if key != "name" {
                play.attributes.push(self.attribute(k, v));
            }
        }
        play
    }

    /// Lowers one task into `parent`: a plain task becomes an atomic unit, a
    /// `block` task becomes a nested unit block.
    fn task(&mut self, node: &Node, parent: &mut UnitBlock) {
        let Node::Map { entries, .. } = node else {
            self.warn(node.line(), "task is not a mapping; skipped");
            return;
        };
        let name = node.get("name").map(|n| value_of(n).text()).unwrap_or_default();
        let span = self.src.span(node.line(), node.end());

        if node.get("block").is_some() {
            let mut block = UnitBlock::new(name, UnitBlockKind::Block, span);
            for section in ["block", "rescue", "always"] {
                if let Some(Node::Seq { items, .. }) = node.get(section) {
                    for item in items {
                        self.task(item, &mut block);
                    }
                }
            }
            parent.nested_blocks.push(block);
            return;
        }

        let Some((module_key, module_value)) = entries
            .iter()
            .find(|(k, _)| !TASK_KEYWORDS.contains(&k.as_key().as_str()))
        else {
            self.warn(node.line(), "task without a module; skipped");
            return;
        };
        let mut module = module_key.as_key();
        let mut unit_args = module_value.clone();
        if matches!(module.as_str(), "action" | "local_action") {
            if let Node::Scalar { text, style, line, end } = module_value {
                let (first, rest) = text.trim().split_once(char::is_whitespace).unwrap_or((text.trim(), ""));
                module = first.to_string();
                unit_args = Node::Scalar {
                    text: rest.trim().to_string(),
                    style: *style,
                    line: *line,
                    end: *end,
                };
            }
        }
        let mut unit = AtomicUnit::new(name, module.clone(), span);
        let short = module.rsplit('.').next().unwrap_or(&module).to_string();

        let mut attributes = Vec::new();
        match &unit_args {
            Node::Map { entries, .. } => {
                attributes.extend(entries.iter().map(|(k, v)| self.attribute(k, v)));
            }
            Node::Scalar { text, style, line, end } if !text.is_empty() => {
                let span = self.src.span(module_key.line(), (*end).max(*line));
                attributes.extend(self.free_form(&short, text, *style, span));
            }
            Node::Scalar { .. } => {}
            other => attributes.push(self.attribute(module_key, other)),
        }
        if let Some(Node::Map { entries, .. }) = node.get("args") {
            attributes.extend(entries.iter().map(|(k, v)| self.attribute(k, v)));
        }
        for attr in attributes {
            let (name, line) = (attr.name.clone(), attr.span.start_line);
            if !unit.push_attribute(attr) {
                self.warn(line, format!("duplicate attribute `{name}` ignored"));
            }
        }
        parent.atomic_units.push(unit);
    }

    /// `module: k=v k2=v2` or a free-form command line.
    fn free_form(
        &self,
        module: &str,
        text: &str,
        style: TScalarStyle,
        span: crate::source::SourceSpan,
    ) -> Vec<Attribute> {
        if COMMAND_MODULES.contains(&module) {
            return vec![Attribute::new("command", scalar_value(text, style), span)];
        }
        let words = shell::words(text);
        let all_pairs = !words.is_empty()
            && words.iter().all(|(w, _)| {
                w.split_once('=').is_some_and(|(k, _)| {
                    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                })
            });
        if all_pairs {
            words
                .into_iter()
                .map(|(w, _)| {
                    let (k, v) = w.split_once('=').unwrap();
                    Attribute::new(k, scalar_value(v, TScalarStyle::Plain), span.clone())
                })
                .collect()
        } else {
            vec![Attribute::new("_raw_params", scalar_value(text, style), span)]
        }
    }

    fn attribute(&self, key: &Node, value: &Node) -> Attribute {
        let name = key.as_key();
        let span = self.src.span(key.line(), value.end().max(key.line()));
        match value {
            Node::Map { entries, .. } => Attribute::with_nested(
                name,
                entries.iter().map(|(k, v)| self.attribute(k, v)).collect(),
                span,
            ),
            Node::Seq { items, .. } if items.iter().any(|i| matches!(i, Node::Map { .. } | Node::Seq { .. })) => {
                let nested = items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| {
                        let index = Node::Scalar {
                            text: i.to_string(),
                            style: TScalarStyle::Plain,
                            line: item.line(),
                            end: item.line(),
                        };
                        self.attribute(&index, item)
                    })
                    .collect();
                Attribute::with_nested(name, nested, span)
            }
            _ => Attribute::new(name, value_of(value), span),
        }
    }

    fn variable(&self, key: &Node, value: &Node) -> Variable {
        Variable::from(self.attribute(key, value))
    }
}

/// Full-line and inline `#` comments, skipping block-scalar bodies and quoted text.
fn comments(src: &SourceText<'_>) -> Vec<Comment> {
    let mut out = Vec::new();
    let mut block_indent: Option<usize> = None;
    for (i, line) in src.lines().iter().enumerate() {
        let n = i + 1;
        let indent = line.len() - line.trim_start().len();
        if let Some(parent) = block_indent {
            if line.trim().is_empty() || indent > parent {
                continue;
            }
            block_indent = None;
        }
        let (code, comment) = split_comment(line);
        if let Some(text) = comment {
            out.extend(Comment::new(text, src.span(n, n)));
        }
        let code = code.trim_end();
        let opens_block = code
            .rsplit(|c: char| c.is_whitespace())
            .next()
            .is_some_and(|last| {
                (last.starts_with('|') || last.starts_with('>'))
                    && last[1..].chars().all(|c| matches!(c, '-' | '+') || c.is_ascii_digit())
            })
            && (code.contains(": ") || code.trim_start().starts_with("- ") || code.ends_with(':'));
        if opens_block {
            // Sequence indicators count as indentation for the key that follows.
            let mut key = line.trim_start();
            let mut key_indent = indent;
            while let Some(rest) = key.strip_prefix("- ") {
                key_indent += 2 + (rest.len() - rest.trim_start().len());
                key = rest.trim_start();
            }
            block_indent = Some(key_indent);
        }
    }
    out
}

/// Splits a line at the first `#` that starts a comment.
fn split_comment(line: &str) -> (&str, Option<&str>) {
    let mut quote: Option<char> = None;
    let mut prev = ' ';
    let mut chars = line.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match quote {
            Some('"') if c == '\\' => {
                chars.next();
            }
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None => match c {
                '\'' | '"' if prev.is_whitespace() || matches!(prev, ':' | '[' | '{' | ',' | '-') => {
                    quote = Some(c)
                }
                '#' if prev.is_whitespace() => return (&line[..i], Some(&line[i + 1..])),
                _ => {}
            },
        }
        prev = c;
    }
    (line, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Parsed {
        AnsibleParser.parse_source("site.yml", src).unwrap()
    }

    #[test]
    fn task_with_flow_mapping() {
        let ub = parse("- name: x\n  file: {path: /tmp/a, mode: '0777'}\n").block;
        let au = &ub.atomic_units[0];
        assert_eq!((au.name.as_str(), au.unit_type.as_str()), ("x", "file"));
        assert_eq!(au.attributes.len(), 2);
        assert_eq!(au.attribute("mode").unwrap().value, Value::string("0777", StringStyle::SingleQuoted));
    }

    #[test]
    fn nested_vars() {
        let ub = parse("- hosts: all\n  vars: {db: {host: h, port: 5432}}\n").block;
        let v = &ub.nested_blocks[0].variables[0];
        assert_eq!(v.name, "db");
        let names: Vec<_> = v.nested.iter().map(|n| n.name.as_str()).collect();
        assert_eq!(names, vec!["host", "port"]);
        assert_eq!(v.nested[1].value, Value::Int(5432));
    }

    #[test]
    fn empty_document() {
        assert!(parse("").block.is_empty());
        assert!(parse("---\n").block.is_empty());
    }

    #[test]
    fn playbook_structure_and_spans() {
        let src = "---\n# deploy\n- hosts: web\n  become: yes\n  tasks:\n    - name: install\n      apt:\n        name: nginx\n        state: present\n\n    # restart it\n    - name: restart\n      service: name=nginx state=restarted\n";
        let ub = parse(src).block;
        let play = &ub.nested_blocks[0];
        assert_eq!(play.name, "web");
        let units = &play.atomic_units;
        assert_eq!(units.len(), 2);
        assert_eq!((units[0].span.start_line, units[0].span.end_line), (6, 9));
        assert_eq!(units[1].attribute("state").unwrap().value.text(), "restarted");
        assert_eq!(ub.comment_count(), 2);
        assert_eq!(play.attribute_names(), vec!["hosts", "become"]);
    }

    #[test]
    fn command_modules_keep_free_form() {
        let ub = parse("- shell: wget http://x | sh\n  args:\n    chdir: /tmp\n").block;
        let au = &ub.atomic_units[0];
        assert_eq!(au.attribute("command").unwrap().value.text(), "wget http://x | sh");
        assert!(au.attribute("chdir").is_some());
    }

    #[test]
    fn jinja_is_guarded_interpolation() {
        let ub = parse("- debug:\n    msg: \"{{ item }}\"\n").block;
        let attr = ub.atomic_units[0].attribute("msg").unwrap();
        let s = attr.value.as_str().unwrap();
        assert_eq!(s.interpolations.len(), 1);
        assert!(s.interpolations[0].guarded);
    }

    #[test]
    fn block_tasks_nest() {
        let src = "- name: b\n  block:\n    - command: a\n  rescue:\n    - command: b\n";
        let ub = parse(src).block;
        assert_eq!(ub.nested_blocks[0].atomic_units.len(), 2);
    }

    #[test]
    fn block_scalars_hide_hashes() {
        let src = "- shell: |\n    echo a # not a comment\n    # nor this\n  # real\n";
        let parsed = parse(src);
        let texts: Vec<_> = parsed.block.comments.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, vec!["real"]);
        let cmd = parsed.block.atomic_units[0].attribute("command").unwrap();
        assert_eq!((cmd.span.start_line, cmd.span.end_line), (1, 3));
    }

    #[test]
    fn syntax_error() {
        assert!(AnsibleParser.parse_source("x.yml", "- a: [1, 2\n").is_err());
        assert!(AnsibleParser.parse_source("x.yml", "a:\n\t- b\n").is_err());
    }

    #[test]
    fn vars_file_root_mapping() {
        let ub = parse("a: 1\nb:\n  c: x\n").block;
        assert_eq!(ub.variables.len(), 2);
        assert_eq!(ub.variable_count(), 3);
    }

    #[test]
    fn tab_inside_flow_mapping_parses() {
        let src = "- name: x\n  file: {\n    path: /tmp/a,\n    \tmode: '0777'}\n";
        let au = &parse(src).block.atomic_units[0];
        assert_eq!(au.attribute("path").unwrap().span.start_line, 3);
        assert_eq!(au.attribute("mode").unwrap().span.start_line, 4);
        assert_eq!(au.span.end_line, 4);
    }

    impl UnitBlock {
        fn attribute_names(&self) -> Vec<&str> {
            self.attributes.iter().map(|a| a.name.as_str()).collect()
        }
    }
}
