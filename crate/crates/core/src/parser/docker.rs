//! Dockerfiles. Every `FROM` opens a build stage; shell-form `RUN` commands
//! are split into one atomic unit per shell statement.

use super::{attach_comments, warning, Parsed, Parser, TechnologyId};
use crate::error::SyntaxError;
use crate::ir::{
    scan_dollar_markers, AtomicUnit, Attribute, Comment, StringStyle, StringValue, UnitBlock,
    UnitBlockKind, Value, Variable,
};
use crate::shell;
use crate::source::SourceText;

pub struct DockerParser;

const INSTRUCTIONS: &[&str] = &[
    "ADD", "ARG", "CMD", "COPY", "ENTRYPOINT", "ENV", "EXPOSE", "FROM", "HEALTHCHECK", "LABEL",
    "MAINTAINER", "ONBUILD", "RUN", "SHELL", "STOPSIGNAL", "USER", "VOLUME", "WORKDIR",
];

impl Parser for DockerParser {
    fn technology(&self) -> TechnologyId {
        TechnologyId::Docker
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        let src = SourceText::new(path, source);
        let (instructions, comments) = instructions(&src)?;
        let mut root = UnitBlock::new(path, UnitBlockKind::Script, src.whole());
        let mut warnings = Vec::new();

        for ins in instructions {
            let upper = ins.keyword.to_ascii_uppercase();
            if !INSTRUCTIONS.contains(&upper.as_str()) {
                return Err(SyntaxError::new(ins.start, format!("unknown instruction `{}`", ins.keyword)));
            }
            if upper == "FROM" {
                let name = stage_name(&ins.args, root.nested_blocks.len());
                let mut stage = UnitBlock::new(name, UnitBlockKind::BuildStage, src.span(ins.start, ins.end));
                if let Some(image) = from_image(&ins.args) {
                    stage
                        .attributes
                        .push(Attribute::new("image", bare(image), src.span(ins.start, ins.end)));
                }
                root.nested_blocks.push(stage);
                continue;
            }
            let stage = match root.nested_blocks.last_mut() {
                Some(stage) => stage,
                None if upper == "ARG" => &mut root,
                None => {
                    warnings.push(warning(path, ins.start, format!("`{upper}` before any FROM")));
                    root.nested_blocks.push(UnitBlock::new(
                        "stage-0",
                        UnitBlockKind::BuildStage,
                        src.span(ins.start, ins.end),
                    ));
                    root.nested_blocks.last_mut().unwrap()
                }
            };
            if stage.kind == UnitBlockKind::BuildStage {
                stage.span = src.span(stage.span.start_line, ins.end);
            }
            lower_instruction(&src, &ins, &upper, stage);
        }

        attach_comments(&mut root, comments);
        Ok(Parsed { block: root, warnings })
    }
}

/// One instruction after joining continuation lines.
struct Instruction {
    keyword: String,
    /// Arguments with continuations removed; physical lines are kept apart by `\n`.
    args: String,
    /// `(offset in args, physical line)` for the start of every physical line piece.
    line_starts: Vec<(usize, usize)>,
    start: usize,
    end: usize,
}

impl Instruction {
    fn line_at(&self, offset: usize) -> usize {
        let idx = self.line_starts.partition_point(|(o, _)| *o <= offset);
        self.line_starts[idx.saturating_sub(1)].1
    }
}

fn instructions(src: &SourceText<'_>) -> Result<(Vec<Instruction>, Vec<Comment>), SyntaxError> {
    let mut out = Vec::new();
    let mut comments = Vec::new();
    let mut n = 1;
    let total = src.line_count();
    while n <= total {
        let line = src.line(n);
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            n += 1;
            continue;
        }
        if let Some(text) = trimmed.strip_prefix('#') {
            comments.extend(Comment::new(text, src.span(n, n)));
            n += 1;
            continue;
        }
        let start = n;
        let keyword_len = trimmed
            .find(char::is_whitespace)
            .unwrap_or(trimmed.len());
        let keyword = trimmed[..keyword_len].to_string();
        let mut args = String::new();
        let mut line_starts = Vec::new();
        let mut piece = &trimmed[keyword_len..];
        loop {
            line_starts.push((args.len(), n));
            let (body, continued) = match piece.trim_end().strip_suffix('\\') {
                Some(body) => (body, true),
                None => (piece, false),
            };
            args.push_str(body);
            if !continued {
                break;
            }
            n += 1;
            // Comment and blank lines inside a continuation are dropped.
            while n <= total {
                let next = src.line(n).trim_start();
                if let Some(text) = next.strip_prefix('#') {
                    comments.extend(Comment::new(text, src.span(n, n)));
                } else if !next.is_empty() {
                    break;
                }
                n += 1;
            }
            if n > total {
                n = total;
                break;
            }
            args.push('\n');
            piece = src.line(n);
        }
        // Strip leading whitespace while keeping offsets consistent.
        let lead = args.len() - args.trim_start().len();
        let args_trimmed = args[lead..].trim_end().to_string();
        let line_starts = line_starts
            .into_iter()
            .map(|(o, l)| (o.saturating_sub(lead), l))
            .collect();
        out.push(Instruction {
            keyword,
            args: args_trimmed,
            line_starts,
            start,
            end: n,
        });
        n += 1;
    }
    Ok((out, comments))
}

fn bare(text: impl Into<String>) -> Value {
    let text = text.into();
    let markers = scan_dollar_markers(&text);
    Value::Str(StringValue::new(text, StringStyle::Bare).with_interpolations(markers))
}

fn flattened(args: &str) -> String {
    args.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn from_image(args: &str) -> Option<&str> {
    args.split_whitespace().find(|w| !w.starts_with("--"))
}

fn stage_name(args: &str, index: usize) -> String {
    let words: Vec<&str> = args.split_whitespace().collect();
    match words.iter().position(|w| w.eq_ignore_ascii_case("as")) {
        Some(i) if i + 1 < words.len() => words[i + 1].to_string(),
        _ => format!("stage-{index}"),
    }
}

/// JSON exec form, e.g. `["executable", "arg"]`.
fn exec_form(args: &str) -> Option<Vec<String>> {
    let trimmed = args.trim();
    if !trimmed.starts_with('[') {
        return None;
    }
    serde_json::from_str(trimmed).ok()
}

fn lower_instruction(src: &SourceText<'_>, ins: &Instruction, upper: &str, stage: &mut UnitBlock) {
    let span = src.span(ins.start, ins.end);
    match upper {
        "RUN" => lower_run(src, ins, stage),
        "ENV" => {
            for (name, value) in key_values(&ins.args, true) {
                stage.variables.push(Variable::new(name, bare(value), span.clone()));
            }
        }
        "ARG" => {
            let decl = ins.args.trim();
            let (name, value) = match decl.split_once('=') {
                Some((n, v)) => (n, bare(unquote(v))),
                None => (decl, Value::Null),
            };
            stage.variables.push(Variable::new(name, value, span));
        }
        _ => {
            let mut unit = AtomicUnit::new(ins.keyword.clone(), upper.to_ascii_lowercase(), span.clone());
            let attr = |name: &str, value: Value| Attribute::new(name, value, span.clone());
            match upper {
                "COPY" | "ADD" => {
                    let words: Vec<&str> = match exec_form(&ins.args) {
                        Some(_) => Vec::new(),
                        None => ins.args.split_whitespace().collect(),
                    };
                    let (flags, paths): (Vec<&str>, Vec<&str>) =
                        words.into_iter().partition(|w| w.starts_with("--"));
                    let mut paths: Vec<String> = paths.into_iter().map(String::from).collect();
                    if let Some(list) = exec_form(&ins.args) {
                        paths = list;
                    }
                    if !flags.is_empty() {
                        unit.push_attribute(attr("flags", bare(flags.join(" "))));
                    }
                    if let Some(dest) = paths.pop() {
                        if !paths.is_empty() {
                            unit.push_attribute(attr("src", bare(paths.join(" "))));
                        }
                        unit.push_attribute(attr("dest", bare(dest)));
                    }
                }
                "USER" => {
                    unit.push_attribute(attr("user", bare(ins.args.trim())));
                }
                "EXPOSE" => {
                    unit.push_attribute(attr("ports", bare(flattened(&ins.args))));
                }
                "WORKDIR" => {
                    unit.push_attribute(attr("path", bare(ins.args.trim())));
                }
                "LABEL" => {
                    for (name, value) in key_values(&ins.args, false) {
                        unit.push_attribute(attr(&name, bare(value)));
                    }
                }
                "CMD" | "ENTRYPOINT" | "HEALTHCHECK" => {
                    let command = exec_form(&ins.args)
                        .map(|l| l.join(" "))
                        .unwrap_or_else(|| shell::join_continuations(&ins.args).replace('\n', " "));
                    unit.push_attribute(attr("command", bare(command.trim())));
                }
                _ => {
                    if !ins.args.trim().is_empty() {
                        unit.push_attribute(attr("args", bare(flattened(&ins.args))));
                    }
                }
            }
            stage.atomic_units.push(unit);
        }
    }
}

fn lower_run(src: &SourceText<'_>, ins: &Instruction, stage: &mut UnitBlock) {
    if let Some(list) = exec_form(&ins.args) {
        let span = src.span(ins.start, ins.end);
        let Some((first, rest)) = list.split_first() else {
            return;
        };
        let mut unit = AtomicUnit::new(first.clone(), first.clone(), span.clone());
        if !rest.is_empty() {
            unit.push_attribute(Attribute::new("args", bare(rest.join(" ")), span));
        }
        stage.atomic_units.push(unit);
        return;
    }
    // Leading `--mount=...` style flags belong to RUN itself.
    let mut body_start = 0;
    for (word, offset) in shell::words(&ins.args) {
        if word.starts_with("--") {
            body_start = offset + word.len();
        } else {
            break;
        }
    }
    let body_start = ins.args[body_start..]
        .find(|c: char| !c.is_whitespace())
        .map_or(ins.args.len(), |i| body_start + i);
    let body = &ins.args[body_start..];
    for stmt in shell::split_statements(body, false) {
        let words = shell::words(stmt.text);
        let Some((command, offset)) = words.iter().find(|(w, _)| !is_env_prefix(w)).cloned() else {
            continue;
        };
        let start = ins.line_at(body_start + stmt.start);
        let end = ins.line_at(body_start + stmt.end.saturating_sub(1).max(stmt.start));
        let span = src.span(start, end);
        let mut unit = AtomicUnit::new(command.clone(), command.clone(), span.clone());
        let rest = stmt.text[offset..]
            .split_once(char::is_whitespace)
            .map_or("", |(_, r)| r)
            .trim();
        if !rest.is_empty() {
            unit.push_attribute(Attribute::new("args", bare(rest.replace('\n', " ")), span));
        }
        stage.atomic_units.push(unit);
    }
}

fn is_env_prefix(word: &str) -> bool {
    match word.split_once('=') {
        Some((name, _)) => {
            !name.is_empty()
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !name.starts_with(|c: char| c.is_ascii_digit())
        }
        None => false,
    }
}

fn unquote(s: &str) -> String {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return s[1..s.len() - 1].to_string();
        }
    }
    s.to_string()
}

/// `k=v k2="v 2"` pairs, or the legacy `k v` form when `legacy` is allowed.
fn key_values(args: &str, legacy: bool) -> Vec<(String, String)> {
    let words = shell::words(args);
    if legacy {
        if let Some((first, _)) = words.first() {
            if !first.contains('=') {
                let rest = args.trim_start()[first.len()..].trim();
                return vec![(first.clone(), unquote(rest))];
            }
        }
    }
    words
        .into_iter()
        .filter_map(|(w, _)| {
            let (k, v) = w.split_once('=')?;
            Some((k.to_string(), v.to_string()))
        })
        .collect()
}
