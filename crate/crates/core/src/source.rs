//! Source text normalization and line-anchored spans.

use std::fmt;

/// File path plus an inclusive, 1-based line range and the verbatim text of those lines.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub path: String,
    pub start_line: usize,
    pub end_line: usize,
    pub raw_code: String,
}

impl SourceSpan {
    /// Span that carries a location but no text (folders, synthetic nodes).
    pub fn location(path: impl Into<String>, line: usize) -> Self {
        let line = line.max(1);
        SourceSpan {
            path: path.into(),
            start_line: line,
            end_line: line,
            raw_code: String::new(),
        }
    }

    pub fn line_count(&self) -> usize {
        self.end_line - self.start_line + 1
    }

    pub fn contains_line(&self, line: usize) -> bool {
        (self.start_line..=self.end_line).contains(&line)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start_line == self.end_line {
            write!(f, "{}:{}", self.path, self.start_line)
        } else {
            write!(f, "{}:{}-{}", self.path, self.start_line, self.end_line)
        }
    }
}

/// Decodes raw bytes as UTF-8 (lossy) and normalizes CRLF / CR to LF.
pub fn decode(bytes: &[u8]) -> String {
    normalize_newlines(&String::from_utf8_lossy(bytes))
}

pub fn normalize_newlines(text: &str) -> String {
    if !text.contains('\r') {
        return text.to_string();
    }
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// A normalized source file split into lines, used by parsers to cut spans.
#[derive(Debug, Clone)]
pub struct SourceText<'a> {
    path: &'a str,
    text: &'a str,
    lines: Vec<&'a str>,
    line_starts: Vec<usize>,
}

impl<'a> SourceText<'a> {
    /// `text` must already be newline-normalized.
    pub fn new(path: &'a str, text: &'a str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        // "a\nb\n" has two lines, not three.
        if text.ends_with('\n') {
            line_starts.pop();
        }
        if text.is_empty() {
            line_starts.clear();
        }
        let lines = text.lines().collect();
        SourceText {
            path,
            text,
            lines,
            line_starts,
        }
    }

    pub fn path(&self) -> &'a str {
        self.path
    }

    pub fn text(&self) -> &'a str {
        self.text
    }

    pub fn lines(&self) -> &[&'a str] {
        &self.lines
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Line `n` (1-based); empty for out-of-range lines.
    pub fn line(&self, n: usize) -> &'a str {
        n.checked_sub(1)
            .and_then(|i| self.lines.get(i))
            .copied()
            .unwrap_or("")
    }

    /// 1-based line containing byte `offset`.
    pub fn line_of_offset(&self, offset: usize) -> usize {
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i.max(1),
        }
    }

    /// Byte offset of the first character of line `n` (1-based).
    pub fn offset_of_line(&self, n: usize) -> usize {
        n.checked_sub(1)
            .and_then(|i| self.line_starts.get(i))
            .copied()
            .unwrap_or(self.text.len())
    }

    /// 0-based character column of byte `offset` within its line.
    pub fn column_of_offset(&self, offset: usize) -> usize {
        let line = self.line_of_offset(offset);
        let start = self.offset_of_line(line).min(offset);
        self.text[start..offset].chars().count()
    }

    /// Span over lines `start..=end`, clamped to the file.
    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let last = self.lines.len().max(1);
        let start = start.clamp(1, last);
        let end = end.clamp(start, last);
        let raw_code = if self.lines.is_empty() {
            String::new()
        } else {
            self.lines[start - 1..end].join("\n")
        };
        SourceSpan {
            path: self.path.to_string(),
            start_line: start,
            end_line: end,
            raw_code,
        }
    }

    pub fn span_of_offsets(&self, start: usize, end: usize) -> SourceSpan {
        let first = self.line_of_offset(start);
        let last = self.line_of_offset(end.saturating_sub(1).max(start));
        self.span(first, last)
    }

    /// Span of the whole file.
    pub fn whole(&self) -> SourceSpan {
        self.span(1, self.lines.len().max(1))
    }
}
