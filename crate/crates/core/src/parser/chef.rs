//! Chef recipes in a restricted grammar: comments, simple assignments,
//! conditionals, and resource blocks of the form
//!
//! ```text
//! TYPE 'NAME' do
//!   attribute value
//! end
//! ```
//!
//! Anything else at the top level is skipped with a warning.

use std::sync::LazyLock;

use regex::Regex;

use super::{attach_comments, warning, Parsed, Parser, TechnologyId};
use crate::error::SyntaxError;
use crate::ir::{
    scan_delimited_markers, AtomicUnit, Attribute, Comment, StringStyle, StringValue, UnitBlock,
    UnitBlockKind, Value, Variable,
};
use crate::source::SourceText;

pub struct ChefParser;

impl Parser for ChefParser {
    fn technology(&self) -> TechnologyId {
        TechnologyId::Chef
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        let src = SourceText::new(path, source);
        let (lines, comments) = logical_lines(&src)?;
        let mut parser = RecipeParser {
            src: &src,
            lines,
            pos: 0,
            warnings: Vec::new(),
        };
        let mut root = UnitBlock::new(path, UnitBlockKind::Script, src.whole());
        if let Some(stray) = parser.parse_statements(&mut root, &[])? {
            return Err(SyntaxError::new(stray.start, format!("unexpected `{}`", stray.code)));
        }
        attach_comments(&mut root, comments);
        Ok(Parsed {
            block: root,
            warnings: parser.warnings,
        })
    }
}

/// One Ruby statement, possibly spanning several physical lines.
#[derive(Debug, Clone)]
struct Line {
    code: String,
    start: usize,
    end: usize,
    heredoc: Option<String>,
}

impl Line {
    fn keyword(&self) -> &str {
        self.code
            .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .next()
            .unwrap_or("")
    }

    fn is_end(&self) -> bool {
        self.keyword() == "end"
    }

    /// Whether this statement opens a block closed by `end`.
    fn opens_block(&self) -> bool {
        static DO_BLOCK: LazyLock<Regex> =
            LazyLock::new(|| Regex::new(r"\bdo(\s*\|[^|]*\|)?\s*$").unwrap());
        matches!(
            self.keyword(),
            "if" | "unless" | "case" | "while" | "until" | "begin" | "def" | "class" | "module"
        ) || DO_BLOCK.is_match(&self.code)
    }
}

static HEREDOC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"<<[-~]?(['"]?)([A-Z_][A-Z0-9_]*)(['"]?)"#).unwrap());

fn logical_lines(src: &SourceText<'_>) -> Result<(Vec<Line>, Vec<Comment>), SyntaxError> {
    let mut lines = Vec::new();
    let mut comments = Vec::new();
    let mut code = String::new();
    let mut start = 0;
    let mut quote: Option<char> = None;
    let mut interp_depth = 0usize;
    let mut depth = 0i64;
    let mut n = 1;
    let total = src.line_count();

    while n <= total {
        let physical = src.line(n);
        if quote.is_none() && depth == 0 && code.is_empty() && physical.starts_with("=begin") {
            let first = n;
            while n <= total && !src.line(n).starts_with("=end") {
                n += 1;
            }
            if n > total {
                return Err(SyntaxError::new(first, "unterminated =begin comment"));
            }
            let body = (first + 1..n).map(|l| src.line(l)).collect::<Vec<_>>().join("\n");
            comments.extend(Comment::new(&body, src.span(first, n)));
            n += 1;
            continue;
        }
        if code.is_empty() {
            start = n;
        } else {
            code.push('\n');
        }
        let mut chars = physical.char_indices().peekable();
        let mut comment_at = None;
        while let Some((i, c)) = chars.next() {
            match quote {
                Some(q) => {
                    if interp_depth > 0 {
                        match c {
                            '{' => interp_depth += 1,
                            '}' => interp_depth -= 1,
                            _ => {}
                        }
                    } else if c == '\\' {
                        code.push(c);
                        if let Some((_, e)) = chars.next() {
                            code.push(e);
                        }
                        continue;
                    } else if c == q {
                        quote = None;
                    } else if q == '"' && c == '#' && chars.peek().map(|p| p.1) == Some('{') {
                        interp_depth = 1;
                        code.push(c);
                        chars.next();
                        code.push('{');
                        continue;
                    }
                }
                None => match c {
                    '#' => {
                        comment_at = Some(i);
                        break;
                    }
                    '\'' | '"' => quote = Some(c),
                    '(' | '[' | '{' => depth += 1,
                    ')' | ']' | '}' => depth -= 1,
                    _ => {}
                },
            }
            code.push(c);
        }
        if let Some(i) = comment_at {
            let text = physical[i..].trim_start_matches('#');
            comments.extend(Comment::new(text, src.span(n, n)));
        }
        if depth < 0 {
            return Err(SyntaxError::new(n, "unbalanced closing bracket"));
        }
        let trimmed = code.trim_end();
        let continued = quote.is_some()
            || depth > 0
            || trimmed.ends_with(',')
            || trimmed.ends_with('\\')
            || trimmed.ends_with("&&")
            || trimmed.ends_with("||");
        if continued && n < total {
            n += 1;
            continue;
        }
        if quote.is_some() {
            return Err(SyntaxError::new(start, "unterminated string"));
        }
        if depth > 0 {
            return Err(SyntaxError::new(start, "unbalanced brackets"));
        }
        let mut line = Line {
            code: std::mem::take(&mut code).trim().to_string(),
            start,
            end: n,
            heredoc: None,
        };
        if let Some(caps) = HEREDOC.captures(&line.code) {
            let id = caps[2].to_string();
            let mut body = Vec::new();
            loop {
                n += 1;
                if n > total {
                    return Err(SyntaxError::new(start, format!("unterminated heredoc `{id}`")));
                }
                if src.line(n).trim() == id {
                    break;
                }
                body.push(src.line(n));
            }
            line.heredoc = Some(body.join("\n"));
            line.end = n;
        }
        if !line.code.is_empty() {
            lines.push(line);
        }
        n += 1;
    }
    Ok((lines, comments))
}

static RESOURCE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"^([a-z_][a-z0-9_]*)\s*\(?\s*('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*"|[a-z_@][\w.\[\]'":]*)\s*\)?\s+do(\s*\|[^|]*\|)?$"#,
    )
    .unwrap()
});

static SHORT_RESOURCE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^([a-z_][a-z0-9_]*)\s*\(?\s*('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")\s*\)?$"#).unwrap()
});

static ASSIGNMENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^([a-z_@][\w]*|node(?:\.\w+)*(?:\[[^\]]+\])+)\s*(?:\|\||\+|-)?=\s*([^=~][\s\S]*|)$"#)
        .unwrap()
});

static ATTRIBUTE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^([a-z_][a-z0-9_]*[!?]?)(?:\s*\(([\s\S]*)\)|\s+([\s\S]*))?$"#).unwrap());

/// Method calls recognized at the top level that are neither resources nor smells.
const IGNORED_CALLS: &[&str] = &["include_recipe", "require", "require_relative"];

struct RecipeParser<'s> {
    src: &'s SourceText<'s>,
    lines: Vec<Line>,
    pos: usize,
    warnings: Vec<String>,
}

impl<'s> RecipeParser<'s> {
    fn warn(&mut self, line: usize, message: impl std::fmt::Display) {
        self.warnings.push(warning(self.src.path(), line, message));
    }

    /// Parses statements into `block` until a line whose keyword is in `stop` (returned
    /// unconsumed) or end of input (`None`).
    fn parse_statements(
        &mut self,
        block: &mut UnitBlock,
        stop: &[&str],
    ) -> Result<Option<Line>, SyntaxError> {
        while let Some(line) = self.lines.get(self.pos).cloned() {
            if stop.contains(&line.keyword()) || line.is_end() {
                return Ok(Some(line));
            }
            self.pos += 1;
            if let Some(caps) = RESOURCE.captures(&line.code) {
                let unit = self.parse_resource(&line, &caps[1], &caps[2])?;
                block.atomic_units.push(unit);
            } else if matches!(line.keyword(), "if" | "unless" | "case") {
                let conditional = self.parse_conditional(&line)?;
                block.nested_blocks.push(conditional);
            } else if let Some(caps) = ASSIGNMENT.captures(&line.code) {
                let value = classify(&caps[2], line.heredoc.as_deref());
                block
                    .variables
                    .push(Variable::new(&caps[1], value, self.src.span(line.start, line.end)));
            } else if let Some(caps) = SHORT_RESOURCE.captures(&line.code) {
                if !IGNORED_CALLS.contains(&&caps[1]) {
                    let unit = AtomicUnit::new(
                        title_text(&caps[2]),
                        &caps[1],
                        self.src.span(line.start, line.end),
                    );
                    block.atomic_units.push(unit);
                }
            } else {
                self.warn(line.start, format!("unrecognized statement skipped: `{}`", first_line(&line.code)));
                if line.opens_block() {
                    self.skip_block(&line)?;
                }
            }
        }
        Ok(None)
    }

    /// Consumes lines through the `end` matching an already-consumed opener.
    fn skip_block(&mut self, opener: &Line) -> Result<usize, SyntaxError> {
        let mut depth = 1usize;
        while let Some(line) = self.lines.get(self.pos) {
            self.pos += 1;
            if line.is_end() {
                depth -= 1;
                if depth == 0 {
                    return Ok(line.end);
                }
            } else if line.opens_block() {
                depth += 1;
            }
        }
        Err(SyntaxError::new(opener.start, "block is missing `end`"))
    }

    fn parse_resource(&mut self, header: &Line, unit_type: &str, title: &str) -> Result<AtomicUnit, SyntaxError> {
        let mut unit = AtomicUnit::new(title_text(title), unit_type, self.src.span(header.start, header.end));
        loop {
            let Some(line) = self.lines.get(self.pos).cloned() else {
                return Err(SyntaxError::new(header.start, format!("`{unit_type}` block is missing `end`")));
            };
            self.pos += 1;
            if line.is_end() {
                unit.span = self.src.span(header.start, line.end);
                return Ok(unit);
            }
            if matches!(line.keyword(), "if" | "unless" | "case" | "while" | "until" | "begin") {
                self.warn(line.start, format!("conditional inside `{unit_type}` resource skipped"));
                self.skip_block(&line)?;
                continue;
            }
            let Some(caps) = ATTRIBUTE.captures(&line.code) else {
                self.warn(line.start, format!("unrecognized resource line skipped: `{}`", first_line(&line.code)));
                if line.opens_block() {
                    self.skip_block(&line)?;
                }
                continue;
            };
            let name = caps[1].to_string();
            let args = caps.get(2).or(caps.get(3)).map_or("", |m| m.as_str());
            let (value, end) = if line.opens_block() {
                let end = self.skip_block(&line)?;
                let raw = self.src.span(line.start, end).raw_code;
                (Value::string(raw.trim(), StringStyle::Expression), end)
            } else if args.trim().is_empty() {
                (Value::Null, line.end)
            } else {
                (classify(args, line.heredoc.as_deref()), line.end)
            };
            let attr = Attribute::new(name.clone(), value, self.src.span(line.start, end));
            if !unit.push_attribute(attr) {
                self.warn(line.start, format!("duplicate attribute `{name}` ignored"));
            }
        }
    }

    /// `if`/`unless`/`case` with their branches as nested blocks.
    fn parse_conditional(&mut self, header: &Line) -> Result<UnitBlock, SyntaxError> {
        let mut conditional = UnitBlock::new(first_line(&header.code), UnitBlockKind::Block, self.src.span(header.start, header.end));
        let is_case = header.keyword() == "case";
        let mut branch_header = header.clone();
        if is_case {
            // Statements between `case` and the first `when` are not allowed.
            match self.lines.get(self.pos) {
                Some(l) if l.keyword() == "when" => {
                    branch_header = l.clone();
                    self.pos += 1;
                }
                _ => return Err(SyntaxError::new(header.start, "`case` without `when`")),
            }
        }
        loop {
            let mut branch = UnitBlock::new(
                first_line(&branch_header.code),
                UnitBlockKind::Block,
                self.src.span(branch_header.start, branch_header.end),
            );
            let stop = self.parse_statements(&mut branch, &["else", "elsif", "when"])?;
            let Some(stop) = stop else {
                return Err(SyntaxError::new(header.start, format!("`{}` is missing `end`", header.keyword())));
            };
            self.pos += 1;
            let last = if stop.is_end() { stop.end } else { stop.start - 1 };
            branch.span = self.src.span(branch_header.start, last.max(branch_header.start));
            conditional.nested_blocks.push(branch);
            if stop.is_end() {
                conditional.span = self.src.span(header.start, stop.end);
                return Ok(conditional);
            }
            branch_header = stop;
        }
    }
}

fn first_line(code: &str) -> String {
    code.lines().next().unwrap_or("").trim().to_string()
}

fn title_text(title: &str) -> String {
    match quoted(title) {
        Some((inner, _)) => inner.to_string(),
        None => title.to_string(),
    }
}

/// Inner text and quote char when `s` is exactly one quoted string.
fn quoted(s: &str) -> Option<(&str, char)> {
    let q = s.chars().next().filter(|c| *c == '\'' || *c == '"')?;
    let mut escaped = false;
    for (i, c) in s.char_indices().skip(1) {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == q {
            return (i == s.len() - 1).then(|| (&s[1..i], q));
        }
    }
    None
}

fn ruby_string(inner: &str, q: char) -> Value {
    if q == '"' {
        let markers = scan_delimited_markers(inner, "#{", "}");
        Value::Str(StringValue::new(inner, StringStyle::DoubleQuoted).with_interpolations(markers))
    } else {
        Value::string(inner, StringStyle::SingleQuoted)
    }
}

fn scalar(item: &str) -> Option<Value> {
    let item = item.trim();
    if let Some((inner, q)) = quoted(item) {
        return Some(ruby_string(inner, q));
    }
    if let Some(sym) = item.strip_prefix(':') {
        if !sym.is_empty() && sym.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Some(Value::string(sym, StringStyle::Bare));
        }
    }
    match item {
        "true" => return Some(Value::Bool(true)),
        "false" => return Some(Value::Bool(false)),
        "nil" => return Some(Value::Null),
        _ => {}
    }
    if let Ok(i) = item.replace('_', "").parse::<i64>() {
        if item.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') {
            return Some(Value::Int(i));
        }
    }
    if item.contains('.') && item.parse::<f64>().is_ok() {
        return Some(Value::Float(item.parse().unwrap()));
    }
    None
}

/// Maps a Ruby argument list onto a value without evaluating it.
fn classify(args: &str, heredoc: Option<&str>) -> Value {
    let args = args.trim();
    if let Some(body) = heredoc {
        let markers = scan_delimited_markers(body, "#{", "}");
        return Value::Str(StringValue::new(body, StringStyle::Block).with_interpolations(markers));
    }
    if let Some(v) = scalar(args) {
        return v;
    }
    for open in ["%w(", "%w[", "%W(", "%W["] {
        if let Some(rest) = args.strip_prefix(open) {
            if let Some(inner) = rest.strip_suffix(')').or_else(|| rest.strip_suffix(']')) {
                return Value::List(
                    inner
                        .split_whitespace()
                        .map(|w| Value::string(w, StringStyle::Bare))
                        .collect(),
                );
            }
        }
    }
    if let Some(inner) = args.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let items: Option<Vec<Value>> = inner
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(scalar)
            .collect();
        if let Some(items) = items {
            return Value::List(items);
        }
    }
    let style = if args.starts_with('{') && args.ends_with('}') {
        StringStyle::Hash
    } else {
        StringStyle::Expression
    };
    let markers = scan_delimited_markers(args, "#{", "}");
    Value::Str(StringValue::new(args, style).with_interpolations(markers))
}
