//! Quote-aware splitting of shell command strings.

/// One statement of a command line, as a byte range of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

/// Splits `command` on top-level `&&`, `||`, `;` and, when `split_pipes` is set, `|`.
///
/// Single quotes, double quotes (with backslash escapes), backslash escapes,
/// backticks and parenthesized subshells / `$(...)` are not split. Empty
/// statements are dropped.
pub fn split_statements<'a>(command: &'a str, split_pipes: bool) -> Vec<Statement<'a>> {
    let mut out = Vec::new();
    let bytes = command.as_bytes();
    let mut depth = 0usize;
    let mut quote: Option<u8> = None;
    let mut start = 0;
    let mut i = 0;

    let push = |from: usize, to: usize, out: &mut Vec<Statement<'a>>| {
        let raw = &command[from..to];
        let trimmed = raw.trim();
        if !trimmed.is_empty() {
            let lead = raw.len() - raw.trim_start().len();
            out.push(Statement {
                text: trimmed,
                start: from + lead,
                end: from + lead + trimmed.len(),
            });
        }
    };

    while i < bytes.len() {
        let b = bytes[i];
        if let Some(q) = quote {
            if b == b'\\' && q != b'\'' {
                i += 2;
                continue;
            }
            if b == q {
                quote = None;
            }
            i += 1;
            continue;
        }
        match b {
            b'\\' => {
                i += 2;
                continue;
            }
            b'\'' | b'"' | b'`' => quote = Some(b),
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            _ if depth > 0 => {}
            b'&' if bytes.get(i + 1) == Some(&b'&') => {
                push(start, i, &mut out);
                i += 2;
                start = i;
                continue;
            }
            b'|' if bytes.get(i + 1) == Some(&b'|') => {
                push(start, i, &mut out);
                i += 2;
                start = i;
                continue;
            }
            b'|' if split_pipes => {
                push(start, i, &mut out);
                i += 1;
                start = i;
                continue;
            }
            b';' => {
                push(start, i, &mut out);
                i += 1;
                start = i;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    push(start, command.len(), &mut out);
    out
}

/// Joins backslash-newline continuations into single spaces.
pub fn join_continuations(command: &str) -> String {
    let mut out = String::with_capacity(command.len());
    let mut chars = command.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\\' && chars.peek() == Some(&'\n') {
            chars.next();
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

/// Number of top-level statements, pipes included.
pub fn statement_count(command: &str) -> usize {
    split_statements(&join_continuations(command), true).len()
}

/// Splits a statement into words, removing quotes. Returns the words with the byte
/// offset where each one starts.
pub fn words(statement: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut word_start = None;
    let mut quote: Option<char> = None;
    let mut iter = statement.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        match quote {
            Some(q) if c == q => quote = None,
            Some('"') if c == '\\' => {
                if let Some((_, next)) = iter.next() {
                    current.push(next);
                }
            }
            Some(_) => current.push(c),
            None if c.is_whitespace() => {
                if let Some(s) = word_start.take() {
                    out.push((std::mem::take(&mut current), s));
                }
            }
            None => {
                word_start.get_or_insert(i);
                match c {
                    '\'' | '"' => quote = Some(c),
                    '\\' => {
                        if let Some((_, next)) = iter.next() {
                            current.push(next);
                        }
                    }
                    _ => current.push(c),
                }
            }
        }
    }
    if let Some(s) = word_start {
        out.push((current, s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(cmd: &str, pipes: bool) -> Vec<&str> {
        split_statements(cmd, pipes).into_iter().map(|s| s.text).collect()
    }

    #[test]
    fn splits_on_top_level_operators() {
        assert_eq!(
            texts("apt-get update && apt-get install -y curl", false),
            vec!["apt-get update", "apt-get install -y curl"]
        );
        assert_eq!(texts("a || b; c", false), vec!["a", "b", "c"]);
    }

    #[test]
    fn quotes_and_subshells_are_opaque() {
        assert_eq!(texts("echo 'a && b' \"c; d\"", true), vec!["echo 'a && b' \"c; d\""]);
        assert_eq!(texts("x=$(a | b) && y", true), vec!["x=$(a | b)", "y"]);
        assert_eq!(texts("echo a\\;b", true), vec!["echo a\\;b"]);
    }

    #[test]
    fn pipes_only_when_requested() {
        assert_eq!(texts("mysql -e 'x' | grep y", false).len(), 1);
        assert_eq!(texts("mysql -e 'x' | grep y", true).len(), 2);
        assert_eq!(statement_count("mysql -e 'x' | grep y"), 2);
    }

    #[test]
    fn continuation_lines_are_joined() {
        assert_eq!(statement_count("service x stop \\\n  && restart"), 2);
        assert_eq!(statement_count("single command"), 1);
        assert_eq!(statement_count(""), 0);
    }

    #[test]
    fn word_splitting_removes_quotes() {
        let w: Vec<_> = words("FOO=1 'apt-get' install \"a b\"")
            .into_iter()
            .map(|(w, _)| w)
            .collect();
        assert_eq!(w, vec!["FOO=1", "apt-get", "install", "a b"]);
    }
}
