//! Puppet manifests: classes, defines, nodes, resources, assignments,
//! conditionals and case statements. Conditions, hashes and selectors are kept
//! as raw text.

use super::{attach_comments, warning, Parsed, Parser, TechnologyId};
use crate::error::SyntaxError;
use crate::ir::{
    scan_dollar_markers, AtomicUnit, Attribute, Comment, StringStyle, StringValue, UnitBlock,
    UnitBlockKind, Value, Variable,
};
use crate::source::SourceText;

pub struct PuppetParser;

impl Parser for PuppetParser {
    fn technology(&self) -> TechnologyId {
        TechnologyId::Puppet
    }

    fn parse_source(&self, path: &str, source: &str) -> Result<Parsed, SyntaxError> {
        let src = SourceText::new(path, source);
        let (tokens, comments) = lex(&src)?;
        let mut parser = ManifestParser {
            src: &src,
            tokens,
            pos: 0,
            warnings: Vec::new(),
        };
        let mut root = UnitBlock::new(path, UnitBlockKind::Script, src.whole());
        parser.parse_body(&mut root, false)?;
        attach_comments(&mut root, comments);
        Ok(Parsed {
            block: root,
            warnings: parser.warnings,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// Quoted string; `text` excludes the quotes and keeps escapes verbatim.
    Str { text: String, double: bool },
    Var(String),
    Name(String),
    /// Capitalized type or resource reference.
    Ref(String),
    Num(String),
    Regex,
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
    line: usize,
    end_line: usize,
}

impl Token {
    fn is(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }

    fn is_name(&self, n: &str) -> bool {
        matches!(&self.tok, Tok::Name(m) if m == n)
    }

    fn ends_value(&self) -> bool {
        match &self.tok {
            Tok::Str { .. } | Tok::Var(_) | Tok::Num(_) | Tok::Ref(_) | Tok::Regex => true,
            Tok::Name(n) => n != "node",
            Tok::Punct(p) => matches!(*p, ")" | "]"),
        }
    }
}

const PUNCTS: &[&str] = &[
    "<<|", "|>>", "=>", "+>", "->", "~>", "<-", "<~", "==", "!=", "=~", "!~", ">=", "<=", "<|",
    "|>", "<<", ">>", "+=", "-=", "@@", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", "?",
    "!", "<", ">", "+", "-", "*", "/", "%", "|", ".", "@", "~",
];

const OPERATORS: &[&str] = &[
    "==", "!=", "=~", "!~", ">=", "<=", "<", ">", "+", "-", "*", "/", "%", "<<", ">>", "?", ".",
    "=", "!", ",",
];

type Lexed = (Vec<Token>, Vec<Comment>);

fn lex(src: &SourceText<'_>) -> Result<Lexed, SyntaxError> {
    let text = src.text();
    let bytes = text.as_bytes();
    let mut tokens: Vec<Token> = Vec::new();
    let mut comments = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == b'#' {
            let end = text[i..].find('\n').map_or(text.len(), |n| i + n);
            let line = src.line_of_offset(i);
            let body = text[i..end].trim_start_matches('#');
            comments.extend(Comment::new(body, src.span(line, line)));
            i = end;
            continue;
        }
        if text[i..].starts_with("/*") {
            let end = text[i + 2..]
                .find("*/")
                .map(|n| i + 2 + n + 2)
                .ok_or_else(|| SyntaxError::new(src.line_of_offset(i), "unterminated comment"))?;
            let span = src.span_of_offsets(i, end);
            comments.extend(Comment::new(&text[i + 2..end - 2], span));
            i = end;
            continue;
        }
        let tok = match c {
            b'\'' | b'"' => {
                let mut j = i + 1;
                loop {
                    match bytes.get(j) {
                        None => {
                            return Err(SyntaxError::new(
                                src.line_of_offset(i),
                                "unterminated string",
                            ))
                        }
                        Some(b'\\') => j += 2,
                        Some(&q) if q == c => break,
                        Some(_) => j += 1,
                    }
                }
                i = j + 1;
                Tok::Str {
                    text: text[start + 1..j].to_string(),
                    double: c == b'"',
                }
            }
            b'$' => {
                i += 1;
                if text[i..].starts_with("::") {
                    i += 2;
                }
                i = scan_name(bytes, i, true);
                if i == start + 1 {
                    return Err(SyntaxError::new(src.line_of_offset(start), "bare `$`"));
                }
                Tok::Var(text[start + 1..i].to_string())
            }
            b'0'..=b'9' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'.') {
                    i += 1;
                }
                Tok::Num(text[start..i].to_string())
            }
            b'@' if text[i..].starts_with("@(") => {
                return Err(SyntaxError::new(
                    src.line_of_offset(i),
                    "heredocs are not supported",
                ));
            }
            b'/' if !tokens.last().is_some_and(Token::ends_value) => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != b'/' && bytes[j] != b'\n' {
                    j += if bytes[j] == b'\\' { 2 } else { 1 };
                }
                if bytes.get(j) != Some(&b'/') {
                    return Err(SyntaxError::new(src.line_of_offset(i), "unterminated regex"));
                }
                i = j + 1;
                Tok::Regex
            }
            _ if c.is_ascii_alphabetic() || c == b'_' || text[i..].starts_with("::") => {
                if text[i..].starts_with("::") {
                    i += 2;
                }
                i = scan_name(bytes, i, false);
                let word = &text[start..i];
                if word.trim_start_matches(':').starts_with(|ch: char| ch.is_ascii_uppercase()) {
                    Tok::Ref(word.to_string())
                } else {
                    Tok::Name(word.to_string())
                }
            }
            _ => match PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
                Some(p) => {
                    i += p.len();
                    Tok::Punct(p)
                }
                None => {
                    return Err(SyntaxError::new(
                        src.line_of_offset(i),
                        format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                    ))
                }
            },
        };
        tokens.push(Token {
            tok,
            start,
            end: i,
            line: src.line_of_offset(start),
            end_line: src.line_of_offset(i - 1),
        });
    }
    Ok((tokens, comments))
}

fn scan_name(bytes: &[u8], mut i: usize, variable: bool) -> usize {
    while i < bytes.len() {
        let b = bytes[i];
        let next_alnum = bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric());
        if b.is_ascii_alphanumeric() || b == b'_' {
            i += 1;
        } else if b == b':' && bytes.get(i + 1) == Some(&b':') {
            i += 2;
        } else if b == b'-' && !variable && next_alnum {
            i += 1;
        } else {
            break;
        }
    }
    i
}

struct ManifestParser<'s> {
    src: &'s SourceText<'s>,
    tokens: Vec<Token>,
    pos: usize,
    warnings: Vec<String>,
}

/// Statement-level functions whose arguments are skipped.
const SKIPPED_CALLS: &[&str] = &["include", "contain", "require", "hiera_include", "realize", "tag"];

impl<'s> ManifestParser<'s> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_line(&self) -> usize {
        self.src.line_count().max(1)
    }

    fn err_here(&self, message: impl Into<String>) -> SyntaxError {
        let line = self.peek().map_or(self.eof_line(), |t| t.line);
        SyntaxError::new(line, message)
    }

    fn expect(&mut self, p: &str) -> Result<Token, SyntaxError> {
        match self.peek() {
            Some(t) if t.is(p) => Ok(self.next().unwrap()),
            Some(_) => Err(self.err_here(format!("expected `{p}`"))),
            None => Err(self.err_here(format!("expected `{p}` before end of file"))),
        }
    }

    fn raw(&self, from: usize, to: usize) -> String {
        if from >= to {
            return String::new();
        }
        let (a, b) = (self.tokens[from].start, self.tokens[to - 1].end);
        self.src.text()[a..b].to_string()
    }

    /// Parses statements into `block` until end of input or, if `braced`, a closing `}`
    /// (which is consumed).
    fn parse_body(&mut self, block: &mut UnitBlock, braced: bool) -> Result<usize, SyntaxError> {
        loop {
            let Some(tok) = self.peek().cloned() else {
                if braced {
                    return Err(self.err_here("missing `}`"));
                }
                return Ok(self.eof_line());
            };
            if tok.is("}") {
                if braced {
                    self.pos += 1;
                    return Ok(tok.line);
                }
                return Err(self.err_here("unbalanced `}`"));
            }
            self.parse_statement(block)?;
        }
    }

    fn parse_statement(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let tok = self.peek().cloned().unwrap();
        let next = self.peek_at(1).cloned();
        let next_is = |p: &str| next.as_ref().is_some_and(|t| t.is(p));
        match &tok.tok {
            Tok::Punct(";" | "->" | "~>" | "<-" | "<~") => {
                self.pos += 1;
                Ok(())
            }
            Tok::Punct("@" | "@@") => {
                self.pos += 1;
                self.parse_statement(block)
            }
            Tok::Name(n) if (n == "class" || n == "define") && !next_is("{") => {
                self.parse_definition(block)
            }
            Tok::Name(n) if n == "node" => self.parse_node(block),
            Tok::Name(n) if n == "if" || n == "unless" => self.parse_if(block),
            Tok::Name(n) if n == "case" => self.parse_case(block),
            Tok::Name(n) if n == "function" => {
                self.pos += 1;
                self.skip_until_block()?;
                Ok(())
            }
            Tok::Var(name) if next_is("=") || next_is("+=") => {
                self.pos += 2;
                let (first, last) = self.expression_range(Terminators::Statement)?;
                let value = self.classify(first, last);
                let end_line = self.tokens[last - 1].end_line;
                let var = Variable::new(
                    name.trim_start_matches("::"),
                    value,
                    self.src.span(tok.line, end_line),
                );
                block.variables.push(var);
                Ok(())
            }
            Tok::Name(_) if next_is("{") => self.parse_resource(block),
            Tok::Ref(_) if next_is("{") => self.parse_resource(block),
            Tok::Ref(_) if next_is("<|") || next_is("<<|") => self.skip_collector(),
            Tok::Ref(_) if next_is("[") => {
                self.expression_range(Terminators::Statement)?;
                Ok(())
            }
            Tok::Name(n) if next_is("(") || SKIPPED_CALLS.contains(&n.as_str()) => {
                self.expression_range(Terminators::Statement)?;
                if self.peek().is_some_and(|t| t.is("|")) {
                    self.skip_until_block()?;
                }
                Ok(())
            }
            _ => Err(self.err_here(format!(
                "unsupported construct `{}`",
                self.raw(self.pos, self.pos + 1)
            ))),
        }
    }

    /// Skips tokens up to and including the next brace-delimited block.
    fn skip_until_block(&mut self) -> Result<(), SyntaxError> {
        while let Some(t) = self.peek() {
            if t.is("{") {
                self.skip_balanced()?;
                return Ok(());
            }
            self.pos += 1;
        }
        Err(self.err_here("expected `{`"))
    }

    /// Skips a bracketed group starting at the current opening token.
    fn skip_balanced(&mut self) -> Result<usize, SyntaxError> {
        let mut depth = 0usize;
        while let Some(t) = self.next() {
            match &t.tok {
                Tok::Punct("{" | "(" | "[") => depth += 1,
                Tok::Punct("}" | ")" | "]") => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(t.line);
                    }
                }
                _ => {}
            }
        }
        Err(self.err_here("unbalanced brackets"))
    }

    fn skip_collector(&mut self) -> Result<(), SyntaxError> {
        while let Some(t) = self.next() {
            if t.is("|>") || t.is("|>>") {
                if self.peek().is_some_and(|t| t.is("{")) {
                    self.skip_balanced()?;
                }
                return Ok(());
            }
        }
        Err(self.err_here("unterminated collector"))
    }

    /// `class name (params) inherits parent { ... }` and `define name (params) { ... }`.
    fn parse_definition(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let kw = self.next().unwrap();
        let name = match self.next() {
            Some(Token {
                tok: Tok::Name(n), ..
            }) => n,
            _ => return Err(SyntaxError::new(kw.line, "expected a class or define name")),
        };
        let mut class = UnitBlock::new(name, UnitBlockKind::ClassLike, self.src.span(kw.line, kw.line));
        if self.peek().is_some_and(|t| t.is("(")) {
            class.attributes = self.parse_parameters()?;
        }
        if self.peek().is_some_and(|t| t.is_name("inherits")) {
            self.pos += 2;
        }
        self.expect("{")?;
        let end = self.parse_body(&mut class, true)?;
        class.span = self.src.span(kw.line, end);
        block.nested_blocks.push(class);
        Ok(())
    }

    /// `( Type $name = default, ... )` into attributes.
    fn parse_parameters(&mut self) -> Result<Vec<Attribute>, SyntaxError> {
        self.expect("(")?;
        let mut params = Vec::new();
        loop {
            let Some(t) = self.peek().cloned() else {
                return Err(self.err_here("unterminated parameter list"));
            };
            match &t.tok {
                Tok::Punct(")") => {
                    self.pos += 1;
                    return Ok(params);
                }
                Tok::Punct(",") => self.pos += 1,
                Tok::Ref(_) => {
                    self.pos += 1;
                    if self.peek().is_some_and(|t| t.is("[")) {
                        self.skip_balanced()?;
                    }
                }
                Tok::Var(name) => {
                    self.pos += 1;
                    let (value, end_line) = if self.peek().is_some_and(|t| t.is("=")) {
                        self.pos += 1;
                        let (first, last) = self.expression_range(Terminators::Argument)?;
                        (self.classify(first, last), self.tokens[last - 1].end_line)
                    } else {
                        (Value::Null, t.end_line)
                    };
                    params.push(Attribute::new(
                        name.as_str(),
                        value,
                        self.src.span(t.line, end_line),
                    ));
                }
                _ => return Err(self.err_here("malformed parameter list")),
            }
        }
    }

    fn parse_node(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let kw = self.next().unwrap();
        let first = self.pos;
        while self.peek().is_some_and(|t| !t.is("{")) {
            self.pos += 1;
        }
        let name = self.raw(first, self.pos);
        self.expect("{")?;
        let mut node = UnitBlock::new(
            format!("node {name}"),
            UnitBlockKind::Block,
            self.src.span(kw.line, kw.line),
        );
        let end = self.parse_body(&mut node, true)?;
        node.span = self.src.span(kw.line, end);
        block.nested_blocks.push(node);
        Ok(())
    }

    /// `if`/`unless` with `elsif`/`else` branches, one nested block per branch.
    fn parse_if(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let kw = self.peek().cloned().unwrap();
        let mut conditional = UnitBlock::new(
            String::new(),
            UnitBlockKind::Block,
            self.src.span(kw.line, kw.line),
        );
        let mut end = kw.line;
        let mut first_branch = true;
        while let Some(t) = self.peek().cloned() {
            let is_branch = (first_branch && (t.is_name("if") || t.is_name("unless")))
                || (!first_branch && (t.is_name("elsif") || t.is_name("else")));
            if !is_branch {
                break;
            }
            self.pos += 1;
            let cond_start = self.pos;
            while self.peek().is_some_and(|t| !t.is("{")) {
                if self.peek().is_some_and(|t| t.is("(") || t.is("[")) {
                    self.skip_balanced()?;
                } else {
                    self.pos += 1;
                }
            }
            let keyword = match &t.tok {
                Tok::Name(n) => n.clone(),
                _ => unreachable!(),
            };
            let cond = self.raw(cond_start, self.pos);
            let label = if cond.is_empty() {
                keyword.clone()
            } else {
                format!("{keyword} {cond}")
            };
            self.expect("{")?;
            let mut branch =
                UnitBlock::new(label, UnitBlockKind::Block, self.src.span(t.line, t.line));
            end = self.parse_body(&mut branch, true)?;
            branch.span = self.src.span(t.line, end);
            if first_branch {
                conditional.name = branch.name.clone();
            }
            conditional.nested_blocks.push(branch);
            first_branch = false;
            if keyword == "else" {
                break;
            }
        }
        conditional.span = self.src.span(kw.line, end);
        block.nested_blocks.push(conditional);
        Ok(())
    }

    /// `case expr { opt, opt: { ... } default: { ... } }`.
    fn parse_case(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let kw = self.next().unwrap();
        let expr_start = self.pos;
        while self.peek().is_some_and(|t| !t.is("{")) {
            self.pos += 1;
        }
        let subject = self.raw(expr_start, self.pos);
        self.expect("{")?;
        let mut case = UnitBlock::new(
            format!("case {subject}"),
            UnitBlockKind::Block,
            self.src.span(kw.line, kw.line),
        );
        let mut has_default = false;
        let end = loop {
            let Some(t) = self.peek().cloned() else {
                return Err(self.err_here("unterminated case statement"));
            };
            if t.is("}") {
                self.pos += 1;
                break t.line;
            }
            let opt_start = self.pos;
            let mut depth = 0usize;
            while let Some(o) = self.peek() {
                if depth == 0 && o.is(":") {
                    break;
                }
                if o.is("[") || o.is("(") {
                    depth += 1;
                } else if o.is("]") || o.is(")") {
                    depth = depth.saturating_sub(1);
                }
                if o.is_name("default") && depth == 0 {
                    has_default = true;
                }
                self.pos += 1;
            }
            let options = self.raw(opt_start, self.pos);
            self.expect(":")?;
            self.expect("{")?;
            let mut branch =
                UnitBlock::new(options, UnitBlockKind::Block, self.src.span(t.line, t.line));
            let branch_end = self.parse_body(&mut branch, true)?;
            branch.span = self.src.span(t.line, branch_end);
            case.nested_blocks.push(branch);
        };
        case.default_branch = Some(has_default);
        case.span = self.src.span(kw.line, end);
        block.nested_blocks.push(case);
        Ok(())
    }

    /// `type { title: attrs; title: attrs }`, resource-like class declarations and
    /// resource defaults (`File { attrs }`).
    fn parse_resource(&mut self, block: &mut UnitBlock) -> Result<(), SyntaxError> {
        let type_tok = self.next().unwrap();
        let unit_type = match &type_tok.tok {
            Tok::Name(n) | Tok::Ref(n) => n.clone(),
            _ => unreachable!(),
        };
        self.expect("{")?;
        let defaults = matches!(self.peek().map(|t| &t.tok), Some(Tok::Name(_)))
            && self.peek_at(1).is_some_and(|t| t.is("=>") || t.is("+>"));
        let mut first_body = true;
        loop {
            let Some(t) = self.peek().cloned() else {
                return Err(self.err_here("missing `}` after resource"));
            };
            if t.is("}") {
                self.pos += 1;
                return Ok(());
            }
            let start_line = if first_body { type_tok.line } else { t.line };
            let name = if defaults {
                String::new()
            } else {
                let (first, last) = self.expression_range(Terminators::Title)?;
                self.expect(":")?;
                match &self.tokens[first].tok {
                    Tok::Str { text, .. } if last == first + 1 => text.clone(),
                    _ => self.raw(first, last),
                }
            };
            let mut unit = AtomicUnit::new(name, unit_type.clone(), self.src.span(start_line, start_line));
            let end_line;
            loop {
                let Some(a) = self.peek().cloned() else {
                    return Err(self.err_here("missing `}` after resource"));
                };
                if a.is("}") {
                    end_line = a.line;
                    break;
                }
                if a.is(";") {
                    self.pos += 1;
                    end_line = a.line;
                    break;
                }
                if a.is(",") {
                    self.pos += 1;
                    continue;
                }
                let attr_name = match &a.tok {
                    Tok::Name(n) => n.clone(),
                    Tok::Punct("*") => "*".to_string(),
                    _ => return Err(self.err_here("expected an attribute name")),
                };
                self.pos += 1;
                if !self.peek().is_some_and(|t| t.is("=>") || t.is("+>")) {
                    return Err(self.err_here("expected `=>`"));
                }
                self.pos += 1;
                let (first, last) = self.expression_range(Terminators::Attribute)?;
                let value = self.classify(first, last);
                let attr_end = self.tokens[last - 1].end_line;
                let attr = Attribute::new(attr_name.clone(), value, self.src.span(a.line, attr_end));
                if !unit.push_attribute(attr) {
                    self.warnings.push(warning(
                        self.src.path(),
                        a.line,
                        format!("duplicate attribute `{attr_name}` ignored"),
                    ));
                }
            }
            unit.span = self.src.span(start_line, end_line);
            block.atomic_units.push(unit);
            first_body = false;
        }
    }

    /// Token range `[first, last)` of an expression; leaves `pos` at the terminator.
    fn expression_range(&mut self, terms: Terminators) -> Result<(usize, usize), SyntaxError> {
        let first = self.pos;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 {
                let stop = match terms {
                    Terminators::Attribute => t.is(",") || t.is(";") || t.is("}"),
                    Terminators::Argument => t.is(",") || t.is(")"),
                    Terminators::Title => t.is(":"),
                    Terminators::Statement => {
                        t.is(";")
                            || t.is("}")
                            || t.is("->")
                            || t.is("~>")
                            || (self.pos > first && self.statement_ends_before(self.pos))
                    }
                };
                if stop {
                    break;
                }
            }
            match &t.tok {
                Tok::Punct("{" | "(" | "[") => depth += 1,
                Tok::Punct("}" | ")" | "]") => {
                    if depth == 0 {
                        return Err(self.err_here("unbalanced brackets"));
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.pos += 1;
        }
        if depth > 0 {
            return Err(self.err_here("unbalanced brackets in expression"));
        }
        if self.pos == first {
            return Err(self.err_here("expected an expression"));
        }
        Ok((first, self.pos))
    }

    /// A newline ends a statement-level expression unless an operator continues it.
    fn statement_ends_before(&self, idx: usize) -> bool {
        let prev = &self.tokens[idx - 1];
        let cur = &self.tokens[idx];
        if cur.line <= prev.end_line {
            return false;
        }
        let continues = |t: &Token| match &t.tok {
            Tok::Punct(p) => OPERATORS.contains(p) || matches!(*p, "(" | "[" | "{"),
            Tok::Name(n) => matches!(n.as_str(), "and" | "or" | "in"),
            _ => false,
        };
        let cur_continues = match &cur.tok {
            Tok::Punct(p) => OPERATORS.contains(p) && *p != "!",
            Tok::Name(n) => matches!(n.as_str(), "and" | "or" | "in"),
            _ => false,
        };
        !(continues(prev) || cur_continues)
    }

    /// Maps an expression's tokens onto a value without evaluating it.
    fn classify(&self, first: usize, last: usize) -> Value {
        let toks = &self.tokens[first..last];
        let raw = self.raw(first, last);
        if toks.len() == 1 {
            if let Some(v) = literal(&toks[0]) {
                return v;
            }
        }
        if toks[0].is("{") && matching_close(toks, 0) == Some(toks.len() - 1) {
            return Value::string(raw, StringStyle::Hash);
        }
        if toks.iter().any(|t| t.is("?")) && toks.iter().any(|t| t.is("{")) {
            let markers = scan_dollar_markers(&raw);
            return Value::Str(StringValue::new(raw, StringStyle::Selector).with_interpolations(markers));
        }
        if toks[0].is("[") && matching_close(toks, 0) == Some(toks.len() - 1) {
            let inner = &toks[1..toks.len() - 1];
            let items: Option<Vec<Value>> = inner
                .split(|t| t.is(","))
                .filter(|part| !part.is_empty())
                .map(|part| if part.len() == 1 { literal(&part[0]) } else { None })
                .collect();
            if let Some(items) = items {
                return Value::List(items);
            }
        }
        let markers = scan_dollar_markers(&raw);
        Value::Str(StringValue::new(raw, StringStyle::Expression).with_interpolations(markers))
    }
}

#[derive(Clone, Copy)]
enum Terminators {
    Attribute,
    Argument,
    Title,
    Statement,
}

fn matching_close(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open) {
        match &t.tok {
            Tok::Punct("{" | "(" | "[") => depth += 1,
            Tok::Punct("}" | ")" | "]") => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn literal(tok: &Token) -> Option<Value> {
    Some(match &tok.tok {
        Tok::Str { text, double: true } => {
            let markers = scan_dollar_markers(text);
            Value::Str(StringValue::new(text.clone(), StringStyle::DoubleQuoted).with_interpolations(markers))
        }
        Tok::Str { text, double: false } => Value::string(text.clone(), StringStyle::SingleQuoted),
        Tok::Num(n) => n
            .parse::<i64>()
            .map(Value::Int)
            .or_else(|_| n.parse::<f64>().map(Value::Float))
            .unwrap_or_else(|_| Value::string(n.clone(), StringStyle::Bare)),
        Tok::Name(n) if n == "true" => Value::Bool(true),
        Tok::Name(n) if n == "false" => Value::Bool(false),
        Tok::Name(n) if n == "undef" => Value::Null,
        Tok::Name(n) => Value::string(n.clone(), StringStyle::Bare),
        Tok::Var(v) => {
            let text = format!("${v}");
            let len = text.len();
            Value::Str(StringValue::new(text, StringStyle::Expression).with_interpolations(vec![
                crate::ir::Interpolation {
                    start: 0,
                    end: len,
                    guarded: false,
                },
            ]))
        }
        _ => return None,
    })
}
