//! Terraform configuration files (HCL2).

use std::ops::Range;

use hcl_edit::expr::{Expression, ObjectKey};
use hcl_edit::structure::{Block, Body, Structure};
use hcl_edit::Span;

use super::{attach_comments, Parsed, Parser, TechnologyId};
use crate::error::SyntaxError;
use crate::ir::{
    scan_dollar_markers, AtomicUnit, Attribute, Comment, StringStyle, StringValue, UnitBlock,
    UnitBlockKind, Value, Variable,
};
use crate::source::{SourceSpan, SourceText};

pub struct TerraformParser;

impl Parser for TerraformParser {
    fn technology(&self) -> TechnologyId {
        TechnologyId::Terraform
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        let src = SourceText::new(path, source);
        let body = hcl_edit::parser::parse_body(source)
            .map_err(|e| SyntaxError::new(e.location().line(), e.message().to_string()))?;
        let comments = comments(&src);
        let lower = Lowering { src: &src };
        let mut root = UnitBlock::new(path, UnitBlockKind::Script, src.whole());

        for structure in body.iter() {
            match structure {
                Structure::Attribute(attr) => {
                    root.attributes
                        .push(lower.attribute(attr.key.as_str(), &attr.value, attr.span()));
                }
                Structure::Block(block) => lower.top_level_block(block, &mut root),
            }
        }
        attach_comments(&mut root, comments);
        Ok(Parsed {
            block: root,
            warnings: Vec::new(),
        })
    }
}

struct Lowering<'s> {
    src: &'s SourceText<'s>,
}

impl Lowering<'_> {
    fn span(&self, range: Option<Range<usize>>) -> SourceSpan {
        match range {
            Some(r) => self.src.span_of_offsets(r.start, r.end),
            None => SourceSpan::location(self.src.path(), 1),
        }
    }

    fn raw(&self, range: Option<Range<usize>>) -> String {
        range
            .and_then(|r| self.src.text().get(r))
            .unwrap_or("")
            .to_string()
    }

    fn top_level_block(&self, block: &Block, root: &mut UnitBlock) {
        let ident = block.ident.as_str();
        let labels: Vec<&str> = block.labels.iter().map(|l| l.as_str()).collect();
        let span = self.span(block.span());
        match ident {
            "variable" => {
                let name = labels.first().copied().unwrap_or("");
                let nested = self.body_attributes(&block.body).into_iter().map(Variable::from).collect();
                root.variables.push(Variable::with_nested(name, nested, span));
            }
            "locals" => {
                for attr in self.body_attributes(&block.body) {
                    root.variables.push(Variable::from(attr));
                }
            }
            _ => {
                let (unit_type, name) = match (ident, labels.as_slice()) {
                    ("resource", [t, n, ..]) => (t.to_string(), n.to_string()),
                    ("data", [t, n, ..]) => (format!("data.{t}"), n.to_string()),
                    (_, []) => (ident.to_string(), ident.to_string()),
                    (_, labels) => (ident.to_string(), labels.join(".")),
                };
                let mut unit = AtomicUnit::new(name, unit_type, span);
                unit.attributes = self.body_attributes(&block.body);
                root.atomic_units.push(unit);
            }
        }
    }

    /// Attributes and nested blocks of a body, in source order.
    fn body_attributes(&self, body: &Body) -> Vec<Attribute> {
        body.iter()
            .map(|structure| match structure {
                Structure::Attribute(attr) => {
                    self.attribute(attr.key.as_str(), &attr.value, attr.span())
                }
                Structure::Block(block) => Attribute::with_nested(
                    block.ident.as_str(),
                    self.body_attributes(&block.body),
                    self.span(block.span()),
                ),
            })
            .collect()
    }

    fn attribute(&self, name: &str, expr: &Expression, range: Option<Range<usize>>) -> Attribute {
        let span = self.span(range);
        match expr {
            Expression::Object(object) => {
                let nested = object
                    .iter()
                    .map(|(key, value)| {
                        let key_name = match key {
                            ObjectKey::Ident(ident) => ident.as_str().to_string(),
                            ObjectKey::Expression(Expression::String(s)) => s.as_str().to_string(),
                            ObjectKey::Expression(e) => self.raw(e.span()),
                        };
                        let start = key.span().map(|r| r.start);
                        let end = value.expr().span().map(|r| r.end);
                        let range = start.zip(end).map(|(s, e)| s..e);
                        self.attribute(&key_name, value.expr(), range)
                    })
                    .collect();
                Attribute::with_nested(name, nested, span)
            }
            _ => Attribute::new(name, self.value(expr), span),
        }
    }

    fn value(&self, expr: &Expression) -> Value {
        match expr {
            Expression::Null(_) => Value::Null,
            Expression::Bool(b) => Value::Bool(*b.value()),
            Expression::Number(n) => {
                let raw = self.raw(n.span());
                let raw = raw.trim();
                raw.parse::<i64>()
                    .map(Value::Int)
                    .or_else(|_| raw.parse::<f64>().map(Value::Float))
                    .unwrap_or_else(|_| Value::string(raw, StringStyle::Expression))
            }
            Expression::String(s) => Value::string(s.as_str(), StringStyle::DoubleQuoted),
            Expression::StringTemplate(_) => {
                let raw = self.raw(expr.span());
                let inner = raw
                    .strip_prefix('"')
                    .and_then(|r| r.strip_suffix('"'))
                    .unwrap_or(&raw);
                interpolated(inner, StringStyle::DoubleQuoted)
            }
            Expression::HeredocTemplate(h) => {
                let raw = self.raw(h.template.span());
                interpolated(raw.trim_end_matches('\n'), StringStyle::Block)
            }
            Expression::Array(array) => {
                let items: Vec<Value> = array.iter().map(|e| self.value(e)).collect();
                let simple = items.iter().all(|v| match v {
                    Value::Str(s) => s.style.is_literal(),
                    Value::List(_) => false,
                    _ => true,
                });
                if simple {
                    Value::List(items)
                } else {
                    interpolated(&self.raw(expr.span()), StringStyle::Expression)
                }
            }
            Expression::Object(_) => interpolated(&self.raw(expr.span()), StringStyle::Hash),
            _ => interpolated(&self.raw(expr.span()), StringStyle::Expression),
        }
    }
}

/// HCL only interpolates `${...}`; a bare `$name` is literal text.
fn interpolated(text: &str, style: StringStyle) -> Value {
    let markers = scan_dollar_markers(text)
        .into_iter()
        .filter(|m| m.guarded)
        .collect();
    Value::Str(StringValue::new(text, style).with_interpolations(markers))
}

/// `#`, `//` and `/* */` comments outside strings and heredocs.
fn comments(src: &SourceText<'_>) -> Vec<Comment> {
    let text = src.text();
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    // Interpolation depth stack: each entry counts open braces inside one `${`.
    let mut in_string = false;
    let mut interp: Vec<usize> = Vec::new();
    while i < bytes.len() {
        let b = bytes[i];
        if in_string {
            match b {
                b'\\' => i += 1,
                b'"' => in_string = false,
                b'$' | b'%' if bytes.get(i + 1) == Some(&b'{') => {
                    interp.push(0);
                    in_string = false;
                    i += 1;
                }
                b'\n' => in_string = false,
                _ => {}
            }
            i += 1;
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => {
                if let Some(depth) = interp.last_mut() {
                    *depth += 1;
                }
            }
            b'}' => match interp.last_mut() {
                Some(0) => {
                    interp.pop();
                    in_string = true;
                }
                Some(depth) => *depth -= 1,
                None => {}
            },
            b'#' => {
                let end = text[i..].find('\n').map_or(text.len(), |e| i + e);
                let line = src.line_of_offset(i);
                out.extend(Comment::new(&text[i + 1..end], src.span(line, line)));
                i = end;
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = text[i..].find('\n').map_or(text.len(), |e| i + e);
                let line = src.line_of_offset(i);
                out.extend(Comment::new(&text[i + 2..end], src.span(line, line)));
                i = end;
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let end = text[i + 2..].find("*/").map_or(text.len(), |e| i + 2 + e);
                let span = src.span(src.line_of_offset(i), src.line_of_offset(end.saturating_sub(1).max(i)));
                out.extend(Comment::new(&text[i + 2..end], span));
                i = (end + 2).min(text.len());
                continue;
            }
            b'<' if text[i..].starts_with("<<") && interp.is_empty() => {
                let rest = &text[i + 2..];
                let rest = rest.strip_prefix('-').unwrap_or(rest);
                let id: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                if !id.is_empty() {
                    // Skip to the line holding only the closing identifier.
                    let mut pos = text[i..].find('\n').map_or(text.len(), |e| i + e + 1);
                    while pos < text.len() {
                        let line_end = text[pos..].find('\n').map_or(text.len(), |e| pos + e);
                        if text[pos..line_end].trim() == id {
                            pos = line_end;
                            break;
                        }
                        pos = line_end + 1;
                    }
                    i = pos;
                    continue;
                }
            }
            _ => {}
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> UnitBlock {
        TerraformParser.parse_source("main.tf", src).unwrap().block
    }

    #[test]
    fn resource_becomes_atomic_unit() {
        let ub = parse("resource \"aws_s3_bucket\" \"b\" {\n  bucket = \"x\"\n}\n");
        let au = &ub.atomic_units[0];
        assert_eq!((au.unit_type.as_str(), au.name.as_str()), ("aws_s3_bucket", "b"));
        assert_eq!(au.attributes.len(), 1);
        assert_eq!(au.attributes[0].value, Value::string("x", StringStyle::DoubleQuoted));
        assert_eq!((au.span.start_line, au.span.end_line), (1, 3));
        assert_eq!(au.attributes[0].span.start_line, 2);
    }

    #[test]
    fn variable_has_nested_default() {
        let ub = parse("variable \"region\" {\n  default = \"us-east-1\"\n}\n");
        let v = &ub.variables[0];
        assert_eq!(v.name, "region");
        assert_eq!(v.nested[0].name, "default");
    }

    #[test]
    fn empty_file() {
        assert!(parse("").is_empty());
    }

    #[test]
    fn nested_blocks_and_objects() {
        let src = "resource \"aws_instance\" \"web\" {\n  ami = \"a\"\n  tags = {\n    Name = \"web\"\n  }\n  ebs_block_device {\n    volume_size = 8\n  }\n}\n";
        let au = &parse(src).atomic_units[0];
        let tags = au.attribute("tags").unwrap();
        assert_eq!(tags.nested[0].name, "Name");
        assert_eq!(tags.nested[0].span.start_line, 4);
        let ebs = au.attribute("ebs_block_device").unwrap();
        assert_eq!(ebs.nested[0].value, Value::Int(8));
        assert_eq!((ebs.span.start_line, ebs.span.end_line), (6, 8));
    }

    #[test]
    fn comments_of_all_styles() {
        let src = "# one\n// two\n/* three\n */\nlocals {\n  a = \"#not\" # four\n  b = <<EOT\n# not a comment\nEOT\n  c = \"${x} // no\"\n}\n";
        let ub = parse(src);
        let texts: Vec<_> = ub.comments.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(texts, vec!["one", "two", "three", "four"]);
        assert_eq!(ub.variables.len(), 3);
        assert!(ub.variables[2].value.is_interpolated());
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = TerraformParser.parse_source("x.tf", "resource \"a\" \"b\" {\n  x = \n").unwrap_err();
        assert!(err.line >= 1);
    }

    #[test]
    fn data_and_provider_blocks() {
        let ub = parse("provider \"aws\" {\n  region = \"x\"\n}\ndata \"aws_ami\" \"u\" {}\n");
        let types: Vec<_> = ub.atomic_units.iter().map(|u| (u.unit_type.as_str(), u.name.as_str())).collect();
        assert_eq!(types, vec![("provider", "aws"), ("data.aws_ami", "u")]);
    }
}
