//! The eighteen smell detectors. Behavior that differs by technology lives in
//! strategy objects chosen once when a detector set is built.

pub mod design;
pub mod security;

use crate::ir::{StringValue, Value};
use crate::source::SourceSpan;

/// Lowercased alphanumeric tokens of `text`.
pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Whether any token of `text` equals one of `words`.
pub fn has_word(text: &str, words: &[String]) -> bool {
    tokens(text).any(|t| words.contains(&t))
}

/// Whether any token of the identifier `name` starts with one of `patterns`.
pub fn name_matches(name: &str, patterns: &[String]) -> bool {
    tokens(name).any(|t| patterns.iter().any(|p| t.starts_with(p.as_str())))
}

/// String scalars of a value, list items included.
pub fn strings(value: &Value) -> Vec<&StringValue> {
    match value {
        Value::Str(s) => vec![s],
        Value::List(items) => items.iter().flat_map(strings).collect(),
        _ => Vec::new(),
    }
}

/// Single-line span at `line` of the file `span` belongs to. `line` must lie within `span`.
pub fn line_span(span: &SourceSpan, line: usize) -> SourceSpan {
    let raw = span
        .raw_code
        .split('\n')
        .nth(line.saturating_sub(span.start_line))
        .unwrap_or("");
    SourceSpan {
        path: span.path.clone(),
        start_line: line,
        end_line: line,
        raw_code: raw.to_string(),
    }
}
