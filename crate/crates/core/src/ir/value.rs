use std::fmt;

/// Right-hand side of an attribute or variable. Never evaluated.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Value {
    #[default]
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(StringValue),
    List(Vec<Value>),
}

/// How a string value was written in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StringStyle {
    /// Unquoted scalar (YAML plain, Chef symbol, bare word).
    Bare,
    SingleQuoted,
    DoubleQuoted,
    /// Block scalar or heredoc.
    Block,
    /// Unmodeled expression kept as raw text (references, calls, operators).
    Expression,
    /// Hash / object literal kept as raw text.
    Hash,
    /// Puppet selector (`$x ? { ... }`) kept as raw text.
    Selector,
}

impl StringStyle {
    /// Literal styles are plain text the author typed; the rest are raw code.
    pub fn is_literal(self) -> bool {
        matches!(
            self,
            StringStyle::Bare
                | StringStyle::SingleQuoted
                | StringStyle::DoubleQuoted
                | StringStyle::Block
        )
    }
}

/// A variable reference inside a string, as a byte range of [`StringValue::text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interpolation {
    pub start: usize,
    pub end: usize,
    /// Brace- or bracket-delimited (`${x}`, `{{ x }}`, `#{x}`) as opposed to a bare `$x`.
    pub guarded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StringValue {
    pub text: String,
    pub style: StringStyle,
    pub interpolations: Vec<Interpolation>,
}

impl StringValue {
    pub fn new(text: impl Into<String>, style: StringStyle) -> Self {
        StringValue {
            text: text.into(),
            style,
            interpolations: Vec::new(),
        }
    }

    pub fn with_interpolations(mut self, markers: Vec<Interpolation>) -> Self {
        self.interpolations = markers;
        self
    }

    pub fn is_interpolated(&self) -> bool {
        !self.interpolations.is_empty()
    }

    /// Text of one marker.
    pub fn marker_text(&self, marker: &Interpolation) -> &str {
        &self.text[marker.start..marker.end]
    }

    /// Markers lie on char boundaries inside the text and do not overlap.
    pub fn markers_valid(&self) -> bool {
        let mut last_end = 0;
        self.interpolations.iter().all(|m| {
            let ok = m.start < m.end
                && m.end <= self.text.len()
                && m.start >= last_end
                && self.text.is_char_boundary(m.start)
                && self.text.is_char_boundary(m.end);
            last_end = m.end;
            ok
        })
    }
}

impl Value {
    pub fn string(text: impl Into<String>, style: StringStyle) -> Value {
        Value::Str(StringValue::new(text, style))
    }

    pub fn as_str(&self) -> Option<&StringValue> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Whether this value, or any list element, carries interpolation markers.
    pub fn is_interpolated(&self) -> bool {
        match self {
            Value::Str(s) => s.is_interpolated(),
            Value::List(items) => items.iter().any(Value::is_interpolated),
            _ => false,
        }
    }

    /// Scalar text used by keyword rules. Lists are joined with spaces.
    pub fn text(&self) -> String {
        match self {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Float(f) => f.to_string(),
            Value::Str(s) => s.text.clone(),
            Value::List(items) => items
                .iter()
                .map(Value::text)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    /// Every string marker is well formed; markers only exist on strings by construction.
    pub fn markers_valid(&self) -> bool {
        match self {
            Value::Str(s) => s.markers_valid(),
            Value::List(items) => items.iter().all(Value::markers_valid),
            _ => true,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Str(s) => write!(f, "{:?}", s.text),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Scans `${name}` (guarded) and `$name` (unguarded) references, honoring `\$` escapes.
/// Shared by the Puppet, Docker and Terraform frontends.
pub fn scan_dollar_markers(text: &str) -> Vec<Interpolation> {
    let bytes = text.as_bytes();
    let mut markers = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'$' if bytes.get(i + 1) == Some(&b'{') => {
                let mut depth = 0usize;
                let mut j = i + 1;
                while j < bytes.len() {
                    match bytes[j] {
                        b'{' => depth += 1,
                        b'}' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                let end = (j + 1).min(bytes.len());
                markers.push(Interpolation {
                    start: i,
                    end,
                    guarded: true,
                });
                i = end;
            }
            b'$' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric()
                        || bytes[j] == b'_'
                        || (bytes[j] == b':' && bytes.get(j + 1) == Some(&b':')))
                {
                    j += if bytes[j] == b':' { 2 } else { 1 };
                }
                let name = &text[i + 1..j];
                let starts_ok = name
                    .trim_start_matches(':')
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
                if starts_ok {
                    markers.push(Interpolation {
                        start: i,
                        end: j,
                        guarded: false,
                    });
                    i = j;
                } else {
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }
    markers
}

/// Scans delimited template markers such as `{{ ... }}` or `#{ ... }`.
pub fn scan_delimited_markers(text: &str, open: &str, close: &str) -> Vec<Interpolation> {
    let mut markers = Vec::new();
    let mut from = 0;
    while let Some(rel) = text[from..].find(open) {
        let start = from + rel;
        let body = start + open.len();
        let end = match text[body..].find(close) {
            Some(r) => body + r + close.len(),
            None => text.len(),
        };
        markers.push(Interpolation {
            start,
            end,
            guarded: true,
        });
        from = end;
    }
    markers
}
