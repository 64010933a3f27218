// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser producing a [`ConfigFile`].
//!
//! Parsing never fails. A syntax error inside a top-level item drops that
//! whole item, records a diagnostic and resumes at the next top-level item.
//! Expressions outside the supported subset (calls, operators,
//! conditionals, `for` expressions) become [`ExpressionValue::Opaque`]
//! holding their source text.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{
    Attribute, Block, BodyItem, Comment, ConfigFile, Diagnostic, ExpressionValue, Number, Severity, TemplatePart,
};
use super::lexer::{tokenize, Token, TokenKind};
use crate::span::{FileId, LineIndex};

/// Block types that start a new item when found at column 1 during error
/// recovery.
const TOP_LEVEL_BLOCKS: [&str; 13] = [
    "resource", "data", "module", "variable", "output", "provider", "terraform", "locals", "moved", "import",
    "check", "removed", "backend",
];

struct SyntaxError {
    message: String,
    at: usize,
}

type PResult<T> = Result<T, SyntaxError>;

/// Parses `text` into a [`ConfigFile`] with file id 0.
pub fn parse(text: &str, path: &str) -> ConfigFile {
    parse_with_id(text, path, FileId(0))
}

pub fn parse_with_id(text: &str, path: &str, file_id: FileId) -> ConfigFile {
    let all = tokenize(text, file_id);
    let mut comments = Vec::new();
    let mut toks = Vec::with_capacity(all.len());
    for t in all {
        if t.kind == TokenKind::Comment {
            comments.push(Comment { line: t.span.start_line, text: t.text.to_string(), span: t.span });
        } else {
            toks.push(t);
        }
    }
    let mut p = Parser { src: text, toks, pos: 0, diags: Vec::new() };
    let body = p.file_body();
    ConfigFile {
        path: path.to_string(),
        body,
        diagnostics: p.diags,
        comments,
        span: LineIndex::new(text, file_id).whole(),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token<'a>>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token<'a> {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token<'a> {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn skip_newlines(&mut self) {
        while self.peek().kind == TokenKind::Newline {
            self.pos += 1;
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError { message: message.into(), at: self.pos })
    }

    fn file_body(&mut self) -> Vec<BodyItem> {
        let mut body = Vec::new();
        loop {
            self.skip_newlines();
            if self.peek().kind == TokenKind::Eof {
                break;
            }
            let start = self.pos;
            match self.item(false) {
                Ok(item) => body.push(item),
                Err(e) => {
                    let at = e.at.min(self.toks.len() - 1);
                    self.diags.push(Diagnostic {
                        severity: Severity::Error,
                        message: e.message,
                        span: self.toks[at].span,
                    });
                    self.recover(start, at);
                }
            }
        }
        self.check_duplicates(&body);
        body
    }

    /// Skips the rest of a failed top-level item that began at `start`.
    fn recover(&mut self, start: usize, err_at: usize) {
        let mut depth = 0i32;
        let mut i = start;
        loop {
            let t = &self.toks[i];
            if t.kind == TokenKind::Eof {
                self.pos = i;
                return;
            }
            let past_error = i >= err_at;
            if past_error
                && i > start
                && self.toks[i - 1].kind == TokenKind::Newline
                && t.kind == TokenKind::Identifier
                && t.span.start_col == 1
                && TOP_LEVEL_BLOCKS.contains(&t.text)
            {
                self.pos = i;
                return;
            }
            match t.kind {
                TokenKind::BlockOpen => depth += 1,
                TokenKind::BlockClose => depth -= 1,
                TokenKind::Newline if depth <= 0 && past_error => {
                    self.pos = i + 1;
                    return;
                }
                _ => {}
            }
            i += 1;
        }
    }

    fn item(&mut self, nested: bool) -> PResult<BodyItem> {
        let first = *self.peek();
        match first.kind {
            TokenKind::Identifier => {}
            TokenKind::Error(e) => return self.err(e.message()),
            TokenKind::BlockClose if !nested => return self.err("unexpected '}'"),
            _ => return self.err(format!("expected an attribute or block, found `{}`", first.text)),
        }
        match self.peek_at(1).kind {
            TokenKind::Assign => self.attribute(nested).map(BodyItem::Attribute),
            TokenKind::String | TokenKind::Identifier | TokenKind::BlockOpen => {
                self.block(nested).map(BodyItem::Block)
            }
            _ => {
                self.pos += 1;
                self.err(format!("expected '=' or a block after `{}`", first.text))
            }
        }
    }

    fn attribute(&mut self, nested: bool) -> PResult<Attribute> {
        let name = *self.peek();
        self.pos += 2;
        let start = self.pos;
        let end = self.expr_end(start)?;
        let value = value_of(&self.toks[start..end], self.src);
        let span = name.span.cover(self.toks[end - 1].span);
        self.pos = end;
        self.end_of_item(nested)?;
        Ok(Attribute { name: name.text.to_string(), value, span })
    }

    fn block(&mut self, nested: bool) -> PResult<Block> {
        let kw = *self.peek();
        self.pos += 1;
        let mut labels = Vec::new();
        loop {
            let t = *self.peek();
            match t.kind {
                TokenKind::String => labels.push(unquote(t.text)),
                TokenKind::Identifier => labels.push(t.text.to_string()),
                _ => break,
            }
            self.pos += 1;
        }
        if self.peek().kind != TokenKind::BlockOpen {
            return self.err(format!("expected '{{' to open `{}` block", kw.text));
        }
        let open_at = self.pos;
        self.pos += 1;
        let mut body = Vec::new();
        loop {
            self.skip_newlines();
            match self.peek().kind {
                TokenKind::BlockClose => break,
                TokenKind::Eof => {
                    return Err(SyntaxError {
                        message: format!("`{}` block is missing its closing '}}'", kw.text),
                        at: open_at,
                    })
                }
                _ => body.push(self.item(true)?),
            }
        }
        let close = *self.peek();
        self.pos += 1;
        self.end_of_item(nested)?;
        self.check_duplicates(&body);
        let block = Block { block_type: kw.text.to_string(), labels, body, span: kw.span.cover(close.span) };
        self.check_labels(&block);
        Ok(block)
    }

    fn end_of_item(&mut self, nested: bool) -> PResult<()> {
        match self.peek().kind {
            TokenKind::Newline => {
                self.pos += 1;
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            TokenKind::BlockClose if nested => Ok(()),
            TokenKind::Error(e) => self.err(e.message()),
            _ => self.err(format!("expected a newline, found `{}`", self.peek().text)),
        }
    }

    /// Index of the token ending the expression that starts at `start`.
    fn expr_end(&self, start: usize) -> PResult<usize> {
        let mut depth = 0usize;
        let mut i = start;
        loop {
            let t = &self.toks[i];
            match t.kind {
                TokenKind::Eof => {
                    if depth > 0 {
                        return Err(SyntaxError { message: "unclosed bracket in expression".into(), at: start });
                    }
                    break;
                }
                TokenKind::Error(e) => return Err(SyntaxError { message: e.message().into(), at: i }),
                TokenKind::Newline if depth == 0 => break,
                TokenKind::Assign if depth == 0 => {
                    return Err(SyntaxError { message: "unexpected '=' in expression".into(), at: i })
                }
                TokenKind::BlockOpen => depth += 1,
                TokenKind::Punctuation if t.text == "(" || t.text == "[" => depth += 1,
                TokenKind::BlockClose => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                TokenKind::Punctuation if t.text == ")" || t.text == "]" => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                TokenKind::Punctuation if t.text == "," && depth == 0 => break,
                _ => {}
            }
            i += 1;
        }
        if i == start {
            return Err(SyntaxError { message: "expected a value".into(), at: start });
        }
        Ok(i)
    }

    fn check_duplicates(&mut self, body: &[BodyItem]) {
        let attrs: Vec<&Attribute> = body.iter().filter_map(BodyItem::as_attribute).collect();
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|prev| prev.name == a.name) {
                self.diags.push(Diagnostic {
                    severity: Severity::Warning,
                    message: format!("duplicate attribute `{}`; the last assignment wins", a.name),
                    span: a.span,
                });
            }
        }
    }

    fn check_labels(&mut self, block: &Block) {
        let expected = match block.block_type.as_str() {
            "resource" => 2,
            "terraform" => 0,
            "backend" => 1,
            _ => return,
        };
        if block.labels.len() != expected {
            self.diags.push(Diagnostic {
                severity: Severity::Warning,
                message: format!(
                    "`{}` block should have {} label(s), found {}",
                    block.block_type,
                    expected,
                    block.labels.len()
                ),
                span: block.span,
            });
        }
    }
}

/// Structured value of `toks`, or its source text when the expression is
/// outside the supported subset.
fn value_of(toks: &[Token<'_>], src: &str) -> ExpressionValue {
    parse_exact(toks).unwrap_or_else(|| {
        let start = toks[0].span.start_byte;
        let end = toks[toks.len() - 1].span.end_byte;
        ExpressionValue::Opaque(src[start..end].to_string())
    })
}

fn skip_nl(toks: &[Token<'_>], p: &mut usize) {
    while toks.get(*p).is_some_and(|t| t.kind == TokenKind::Newline) {
        *p += 1;
    }
}

fn parse_exact(toks: &[Token<'_>]) -> Option<ExpressionValue> {
    let mut p = 0;
    let v = primary(toks, &mut p)?;
    skip_nl(toks, &mut p);
    (p == toks.len()).then_some(v)
}

fn primary(toks: &[Token<'_>], p: &mut usize) -> Option<ExpressionValue> {
    skip_nl(toks, p);
    let t = toks.get(*p)?;
    *p += 1;
    match t.kind {
        TokenKind::String => Some(template(&t.text[1..t.text.len() - 1], true)),
        TokenKind::Heredoc => Some(heredoc_value(t.text)),
        TokenKind::Number => Some(ExpressionValue::Number(Number { raw: t.text.to_string() })),
        TokenKind::Bool => Some(ExpressionValue::Bool(t.text == "true")),
        TokenKind::Punctuation if t.text == "-" => {
            let n = toks.get(*p).filter(|n| n.kind == TokenKind::Number)?;
            *p += 1;
            Some(ExpressionValue::Number(Number { raw: format!("-{}", n.text) }))
        }
        TokenKind::Punctuation if t.text == "[" => list(toks, p),
        TokenKind::BlockOpen => map(toks, p),
        TokenKind::Identifier => Some(traversal(t.text, toks, p)),
        _ => None,
    }
}

/// End of a collection element: the first depth-0 token matching `stop`.
/// Newlines stop the scan only when `newline_stops` is set.
fn element_end(toks: &[Token<'_>], from: usize, newline_stops: bool, stop: &dyn Fn(&Token<'_>) -> bool) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(from) {
        if depth == 0 && (stop(t) || (newline_stops && t.kind == TokenKind::Newline)) {
            return Some(i);
        }
        let opens = t.kind == TokenKind::BlockOpen || t.is_punct("(") || t.is_punct("[");
        let closes = t.kind == TokenKind::BlockClose || t.is_punct(")") || t.is_punct("]");
        if opens {
            depth += 1;
        } else if closes {
            depth = depth.checked_sub(1)?;
        }
    }
    None
}

fn list(toks: &[Token<'_>], p: &mut usize) -> Option<ExpressionValue> {
    let mut items = Vec::new();
    loop {
        skip_nl(toks, p);
        if toks.get(*p)?.is_punct("]") {
            *p += 1;
            return Some(ExpressionValue::List(items));
        }
        let end = element_end(toks, *p, false, &|t| t.is_punct(",") || t.is_punct("]"))?;
        items.push(parse_exact(&toks[*p..end])?);
        *p = end;
        if toks[*p].is_punct(",") {
            *p += 1;
        }
    }
}

fn map(toks: &[Token<'_>], p: &mut usize) -> Option<ExpressionValue> {
    let mut entries = Vec::new();
    loop {
        skip_nl(toks, p);
        let key_tok = toks.get(*p)?;
        if key_tok.kind == TokenKind::BlockClose {
            *p += 1;
            return Some(ExpressionValue::Map(entries));
        }
        let key = match key_tok.kind {
            TokenKind::Identifier | TokenKind::Number | TokenKind::Bool => key_tok.text.to_string(),
            TokenKind::String => match template(&key_tok.text[1..key_tok.text.len() - 1], true) {
                ExpressionValue::String(s) => s,
                _ => return None,
            },
            _ => return None,
        };
        *p += 1;
        let sep = toks.get(*p)?;
        if !(sep.kind == TokenKind::Assign || sep.is_punct(":")) {
            return None;
        }
        *p += 1;
        let end = element_end(toks, *p, true, &|t| t.is_punct(",") || t.kind == TokenKind::BlockClose)?;
        if end == *p {
            return None;
        }
        entries.push((key, parse_exact(&toks[*p..end])?));
        *p = end;
        if toks[*p].is_punct(",") {
            *p += 1;
        }
    }
}

fn traversal(first: &str, toks: &[Token<'_>], p: &mut usize) -> ExpressionValue {
    let mut segs = alloc::vec![first.to_string()];
    while let (Some(a), Some(b)) = (toks.get(*p), toks.get(*p + 1)) {
        if a.is_punct(".") && matches!(b.kind, TokenKind::Identifier | TokenKind::Number | TokenKind::Bool)
            || a.is_punct(".") && b.is_punct("*")
        {
            segs.push(b.text.to_string());
            *p += 2;
            continue;
        }
        let index_ok = matches!(b.kind, TokenKind::Number | TokenKind::String) || b.is_punct("*");
        if a.is_punct("[") && index_ok && toks.get(*p + 2).is_some_and(|c| c.is_punct("]")) {
            segs.push(format!("[{}]", b.text));
            *p += 3;
            continue;
        }
        break;
    }
    if segs.len() == 1 && segs[0] == "null" {
        return ExpressionValue::Opaque("null".to_string());
    }
    ExpressionValue::Reference(segs)
}

/// Strips quotes and resolves escapes of a quoted label.
fn unquote(raw: &str) -> String {
    let inner = &raw[1..raw.len() - 1];
    match template(inner, true) {
        ExpressionValue::String(s) => s,
        _ => inner.to_string(),
    }
}

/// Byte index of the `}` closing an interpolation whose body starts at
/// `from`.
fn interpolation_end(s: &str, from: usize) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 1usize;
    let mut in_str = false;
    let mut i = from;
    while i < bytes.len() {
        let b = bytes[i];
        if in_str {
            match b {
                b'\\' => i += 1,
                b'"' => in_str = false,
                _ => {}
            }
        } else {
            match b {
                b'"' => in_str = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
        }
        i += 1;
    }
    None
}

/// Parses string contents into a literal or a template.
fn template(content: &str, escapes: bool) -> ExpressionValue {
    let mut parts = Vec::new();
    let mut lit = String::new();
    let mut i = 0;
    while i < content.len() {
        let rest = &content[i..];
        if rest.starts_with("$${") || rest.starts_with("%%{") {
            lit.push_str(&rest[1..3]);
            i += 3;
            continue;
        }
        if rest.starts_with("${") || rest.starts_with("%{") {
            if let Some(close) = interpolation_end(content, i + 2) {
                if !lit.is_empty() {
                    parts.push(TemplatePart::Literal(core::mem::take(&mut lit)));
                }
                let inner = &content[i + 2..close];
                parts.push(if rest.starts_with('%') {
                    TemplatePart::Opaque(content[i..=close].to_string())
                } else {
                    interpolation(inner)
                });
                i = close + 1;
                continue;
            }
        }
        let c = rest.chars().next().expect("non-empty");
        if escapes && c == '\\' {
            let (decoded, used) = escape(&rest[1..]);
            match decoded {
                Some(ch) => lit.push(ch),
                None => lit.push_str(&rest[..1 + used]),
            }
            i += 1 + used;
            continue;
        }
        lit.push(c);
        i += c.len_utf8();
    }
    if parts.is_empty() {
        return ExpressionValue::String(lit);
    }
    if !lit.is_empty() {
        parts.push(TemplatePart::Literal(lit));
    }
    ExpressionValue::Template(parts)
}

/// Decodes the escape following a backslash. Returns the character, if
/// recognised, and the number of bytes consumed after the backslash.
fn escape(rest: &str) -> (Option<char>, usize) {
    let Some(c) = rest.chars().next() else { return (None, 0) };
    let simple = match c {
        'n' => Some('\n'),
        't' => Some('\t'),
        'r' => Some('\r'),
        '"' => Some('"'),
        '\\' => Some('\\'),
        _ => None,
    };
    if simple.is_some() {
        return (simple, 1);
    }
    let digits = match c {
        'u' => 4,
        'U' => 8,
        _ => return (None, c.len_utf8()),
    };
    let hex = rest.get(1..1 + digits);
    match hex.and_then(|h| u32::from_str_radix(h, 16).ok()).and_then(char::from_u32) {
        Some(ch) => (Some(ch), 1 + digits),
        None => (None, 1),
    }
}

fn interpolation(inner: &str) -> TemplatePart {
    let expr = inner.trim().trim_start_matches('~').trim_end_matches('~').trim();
    let toks: Vec<Token<'_>> = tokenize(expr, FileId(0))
        .into_iter()
        .filter(|t| !matches!(t.kind, TokenKind::Eof | TokenKind::Comment))
        .collect();
    match parse_exact(&toks) {
        Some(ExpressionValue::Reference(segs)) if !toks.is_empty() => TemplatePart::Reference(segs),
        _ => TemplatePart::Opaque(expr.to_string()),
    }
}

fn heredoc_value(text: &str) -> ExpressionValue {
    let indented = text.starts_with("<<-");
    let Some(nl) = text.find('\n') else { return ExpressionValue::String(String::new()) };
    let after = &text[nl + 1..];
    let body = match after.rfind('\n') {
        Some(i) => &after[..=i],
        None => "",
    };
    if !indented {
        return template(body, false);
    }
    let strip = body
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    let mut out = String::with_capacity(body.len());
    for line in body.split_inclusive('\n') {
        let cut = line.len() - line.trim_start().len();
        out.push_str(&line[cut.min(strip)..]);
    }
    template(&out, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(v: &str) -> ExpressionValue {
        ExpressionValue::String(v.to_string())
    }

    fn num(v: &str) -> ExpressionValue {
        ExpressionValue::Number(Number { raw: v.to_string() })
    }

    fn reference(segs: &[&str]) -> ExpressionValue {
        ExpressionValue::Reference(segs.iter().map(|x| x.to_string()).collect())
    }

    fn single_attr(src: &str) -> ExpressionValue {
        let f = parse(src, "t.tf");
        assert!(f.diagnostics.is_empty(), "{:?}", f.diagnostics);
        f.body[0].as_attribute().unwrap().value.clone()
    }

    #[test]
    fn empty_file() {
        let f = parse("", "main.tf");
        assert!(f.body.is_empty());
        assert!(f.diagnostics.is_empty());
    }

    #[test]
    fn literal_values() {
        assert_eq!(single_attr("a = \"x\""), s("x"));
        assert_eq!(single_attr("a = 12"), num("12"));
        assert_eq!(single_attr("a = -3.5"), num("-3.5"));
        assert_eq!(single_attr("a = true"), ExpressionValue::Bool(true));
        assert_eq!(single_attr("a = \"tab\\there\\u00e9\""), s("tab\there\u{e9}"));
    }

    #[test]
    fn collections() {
        assert_eq!(
            single_attr("a = [1, \"b\",\n  c.d,\n]"),
            ExpressionValue::List(vec![num("1"), s("b"), reference(&["c", "d"])])
        );
        assert_eq!(
            single_attr("tags = {\n  Name = \"web\"\n  \"env\": \"prod\", n = 2\n}"),
            ExpressionValue::Map(vec![
                ("Name".to_string(), s("web")),
                ("env".to_string(), s("prod")),
                ("n".to_string(), num("2")),
            ])
        );
        assert_eq!(single_attr("a = []"), ExpressionValue::List(vec![]));
        assert_eq!(single_attr("a = {}"), ExpressionValue::Map(vec![]));
    }

    #[test]
    fn references_with_indexes() {
        assert_eq!(
            single_attr("a = aws_instance.web[0].id"),
            reference(&["aws_instance", "web", "[0]", "id"])
        );
        assert_eq!(single_attr("a = var.list[*].x"), reference(&["var", "list", "[*]", "x"]));
        assert_eq!(single_attr("a = null"), ExpressionValue::Opaque("null".into()));
    }

    #[test]
    fn templates() {
        assert_eq!(
            single_attr("a = \"${var.env}-web\""),
            ExpressionValue::Template(vec![
                TemplatePart::Reference(vec!["var".into(), "env".into()]),
                TemplatePart::Literal("-web".into()),
            ])
        );
        assert_eq!(
            single_attr("a = \"x-${upper(var.e)}\""),
            ExpressionValue::Template(vec![
                TemplatePart::Literal("x-".into()),
                TemplatePart::Opaque("upper(var.e)".into()),
            ])
        );
        assert_eq!(single_attr("a = \"$${literal}\""), s("${literal}"));
    }

    #[test]
    fn opaque_expressions_keep_source_text() {
        for src in [
            "a = var.x ? 1 : 2",
            "a = length(var.list) + 1",
            "a = [for s in var.l : upper(s)]",
            "a = { for k, v in var.m : k => v }",
            "a = (\n  1 + 2\n)",
        ] {
            let text = &src[4..];
            assert_eq!(single_attr(src), ExpressionValue::Opaque(text.into()), "{src}");
        }
    }

    #[test]
    fn heredocs() {
        assert_eq!(single_attr("a = <<EOT\nline1\nline2\nEOT\n"), s("line1\nline2\n"));
        assert_eq!(single_attr("a = <<-EOT\n    x\n      y\n    EOT"), s("x\n  y\n"));
        assert_eq!(
            single_attr("a = <<EOT\nhi ${var.n}\nEOT\n"),
            ExpressionValue::Template(vec![
                TemplatePart::Literal("hi ".into()),
                TemplatePart::Reference(vec!["var".into(), "n".into()]),
                TemplatePart::Literal("\n".into()),
            ])
        );
    }

    #[test]
    fn nested_blocks_and_one_line_blocks() {
        let f = parse(
            "resource \"aws_instance\" \"a\" {\n  lifecycle { create_before_destroy = true }\n  ebs_block_device {\n    size = 10\n  }\n}\n",
            "m.tf",
        );
        assert!(f.diagnostics.is_empty(), "{:?}", f.diagnostics);
        let r = f.blocks().next().unwrap();
        assert_eq!(r.labels, vec!["aws_instance", "a"]);
        let kinds: Vec<_> = r.blocks().map(|b| b.block_type.as_str()).collect();
        assert_eq!(kinds, vec!["lifecycle", "ebs_block_device"]);
        let lc = r.blocks().next().unwrap();
        assert_eq!(lc.get_attribute("create_before_destroy"), Some(&ExpressionValue::Bool(true)));
    }

    #[test]
    fn duplicate_attribute_last_wins_with_warning() {
        let f = parse("resource \"a\" \"b\" {\n  name = \"a\"\n  name = \"b\"\n}\n", "d.tf");
        let b = f.blocks().next().unwrap();
        assert_eq!(b.get_attribute("name"), Some(&s("b")));
        assert_eq!(f.diagnostics.len(), 1);
        assert_eq!(f.diagnostics[0].severity, Severity::Warning);
        assert!(f.diagnostics[0].message.contains("duplicate attribute `name`"));
    }

    #[test]
    fn label_count_warnings() {
        let f = parse("resource \"only_one\" {\n}\nterraform \"x\" {\n}\n", "l.tf");
        assert_eq!(f.body.len(), 2);
        assert_eq!(f.diagnostics.len(), 2);
        assert!(f.diagnostics.iter().all(|d| d.severity == Severity::Warning));
    }

    #[test]
    fn recovers_at_next_top_level_block() {
        let src = "resource \"a\" \"one\" {\n  x = = 1\n}\nresource \"a\" \"two\" {\n  y = 2\n}\n";
        let f = parse(src, "r.tf");
        assert_eq!(f.body.len(), 1);
        assert_eq!(f.blocks().next().unwrap().labels[1], "two");
        assert_eq!(f.diagnostics.len(), 1);
        assert_eq!(f.diagnostics[0].span.start_line, 2);
    }

    #[test]
    fn recovers_from_missing_close_brace() {
        let src = "resource \"a\" \"one\" {\n  x = 1\n\nresource \"a\" \"two\" {\n  y = 2\n}\n";
        let f = parse(src, "r.tf");
        assert_eq!(f.body.len(), 1, "{:?}", f.diagnostics);
        assert_eq!(f.blocks().next().unwrap().labels[1], "two");
        assert!(f.has_errors());
    }

    #[test]
    fn garbage_gives_empty_body_with_diagnostics() {
        for src in ["%%%", "}}}", "\"unterminated", "= = =", "resource {", "a = (1"] {
            let f = parse(src, "g.tf");
            assert!(f.body.is_empty(), "{src}: {:?}", f.body);
            assert!(!f.diagnostics.is_empty(), "{src}");
        }
    }

    #[test]
    fn comments_go_to_side_table() {
        let f = parse("# header\ncount = 5 # Fixed number of instances\n", "c.tf");
        assert_eq!(f.body.len(), 1);
        assert_eq!(f.comments.len(), 2);
        assert_eq!(f.comments_on_line(2).next().unwrap().text, "# Fixed number of instances");
    }

    #[test]
    fn spans_cover_nodes() {
        let src = "resource \"a\" \"b\" {\n  n = 1\n}\n";
        let f = parse(src, "s.tf");
        let b = f.blocks().next().unwrap();
        assert_eq!(b.span.slice(src), "resource \"a\" \"b\" {\n  n = 1\n}");
        let a = b.get_attribute_node("n").unwrap();
        assert_eq!(a.span.slice(src), "n = 1");
        assert_eq!((a.span.start_line, a.span.start_col, a.span.end_col), (2, 3, 8));
    }

    #[test]
    fn find_blocks_respects_labels_and_nesting() {
        let src = "terraform {\n  backend \"gcs\" {\n    bucket = \"b\"\n  }\n}\nresource \"x\" \"y\" {\n}\n";
        let f = parse(src, "f.tf");
        assert_eq!(f.find_blocks("backend", None, false).len(), 0);
        assert_eq!(f.find_blocks("backend", None, true).len(), 1);
        assert_eq!(f.find_blocks("backend", Some(&["gcs"]), true).len(), 1);
        assert_eq!(f.find_blocks("backend", Some(&["s3"]), true).len(), 0);
        assert_eq!(f.find_blocks("resource", Some(&["x"]), false).len(), 1);
    }
}
