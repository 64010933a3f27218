// SPDX-License-Identifier: Apache-2.0

//! Tokenizer for the Terraform subset of HCL.
//!
//! Whitespace other than newlines is not a token; it is kept as the
//! `leading` trivia of the token that follows it, so that
//! [`detokenize`] reproduces the input exactly.

use alloc::string::String;
use alloc::vec::Vec;

use crate::span::{FileId, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    /// A quoted string, including its quotes and any `${...}` parts.
    String,
    Number,
    Bool,
    Punctuation,
    BlockOpen,
    BlockClose,
    Assign,
    Heredoc,
    Comment,
    Newline,
    Eof,
    Error(LexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexError {
    UnterminatedString,
    UnterminatedHeredoc,
    UnterminatedComment,
    UnexpectedChar,
}

impl LexError {
    pub fn message(self) -> &'static str {
        match self {
            LexError::UnterminatedString => "unterminated string literal",
            LexError::UnterminatedHeredoc => "unterminated heredoc",
            LexError::UnterminatedComment => "unterminated block comment",
            LexError::UnexpectedChar => "unexpected character",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Spaces, tabs and lone carriage returns preceding the token.
    pub leading: &'a str,
    pub span: SourceSpan,
}

impl Token<'_> {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }
}

const MULTI_PUNCT: [&str; 8] = ["...", "==", "!=", "<=", ">=", "&&", "||", "=>"];
const SINGLE_PUNCT: &str = "[](),.:?!<>+-*/%";

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    file_id: FileId,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn at_newline(&self) -> bool {
        let r = self.rest();
        r.starts_with('\n') || r.starts_with("\r\n")
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, mark: (usize, u32, u32)) -> SourceSpan {
        SourceSpan {
            file_id: self.file_id,
            start_line: mark.1,
            start_col: mark.2,
            end_line: self.line,
            end_col: self.col,
            start_byte: mark.0,
            end_byte: self.pos,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// Splits `text` into tokens. The last token is always [`TokenKind::Eof`].
pub fn tokenize(text: &str, file_id: FileId) -> Vec<Token<'_>> {
    let mut cur = Cursor { src: text, pos: 0, line: 1, col: 1, file_id };
    if text.starts_with('\u{feff}') {
        // the BOM becomes trivia of the first token without taking a column
        cur.pos = 3;
    }
    let mut out = Vec::new();
    let mut trivia_start = 0;
    loop {
        while let Some(c) = cur.peek() {
            let lone_cr = c == '\r' && cur.peek_nth(1) != Some('\n');
            if c == ' ' || c == '\t' || c == '\x0c' || lone_cr {
                cur.bump();
            } else {
                break;
            }
        }
        let leading = &text[trivia_start..cur.pos];
        let mark = cur.mark();
        let kind = match cur.peek() {
            None => {
                out.push(Token { kind: TokenKind::Eof, text: "", leading, span: cur.span_from(mark) });
                return out;
            }
            Some(c) => lex_one(&mut cur, c),
        };
        let span = cur.span_from(mark);
        out.push(Token { kind, text: &text[mark.0..cur.pos], leading, span });
        trivia_start = cur.pos;
    }
}

fn lex_one(cur: &mut Cursor<'_>, c: char) -> TokenKind {
    match c {
        '\n' => {
            cur.bump();
            TokenKind::Newline
        }
        '\r' => {
            cur.bump();
            cur.bump();
            TokenKind::Newline
        }
        '#' => line_comment(cur),
        '/' if cur.peek_nth(1) == Some('/') => line_comment(cur),
        '/' if cur.peek_nth(1) == Some('*') => block_comment(cur),
        '"' => string(cur),
        '<' if cur.peek_nth(1) == Some('<') && heredoc_header(cur.rest()).is_some() => heredoc(cur),
        '{' => {
            cur.bump();
            TokenKind::BlockOpen
        }
        '}' => {
            cur.bump();
            TokenKind::BlockClose
        }
        '0'..='9' => number(cur),
        c if is_ident_start(c) => {
            let start = cur.pos;
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            match &cur.src[start..cur.pos] {
                "true" | "false" => TokenKind::Bool,
                _ => TokenKind::Identifier,
            }
        }
        _ => {
            if let Some(p) = MULTI_PUNCT.iter().find(|p| cur.rest().starts_with(**p)) {
                for _ in 0..p.len() {
                    cur.bump();
                }
                TokenKind::Punctuation
            } else if c == '=' {
                cur.bump();
                TokenKind::Assign
            } else if SINGLE_PUNCT.contains(c) {
                cur.bump();
                TokenKind::Punctuation
            } else {
                cur.bump();
                TokenKind::Error(LexError::UnexpectedChar)
            }
        }
    }
}

fn line_comment(cur: &mut Cursor<'_>) -> TokenKind {
    while cur.peek().is_some() && !cur.at_newline() {
        cur.bump();
    }
    TokenKind::Comment
}

fn block_comment(cur: &mut Cursor<'_>) -> TokenKind {
    cur.bump();
    cur.bump();
    loop {
        if cur.rest().starts_with("*/") {
            cur.bump();
            cur.bump();
            return TokenKind::Comment;
        }
        if cur.bump().is_none() {
            return TokenKind::Error(LexError::UnterminatedComment);
        }
    }
}

fn number(cur: &mut Cursor<'_>) -> TokenKind {
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
    }
    if cur.peek() == Some('.') && cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = matches!(cur.peek_nth(1), Some('+' | '-'));
        let digit_at = if sign { 2 } else { 1 };
        if cur.peek_nth(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            for _ in 0..digit_at {
                cur.bump();
            }
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
        }
    }
    TokenKind::Number
}

fn string(cur: &mut Cursor<'_>) -> TokenKind {
    cur.bump();
    if string_body(cur) {
        TokenKind::String
    } else {
        TokenKind::Error(LexError::UnterminatedString)
    }
}

/// Consumes a string body after its opening quote, through the closing
/// quote. Returns false when the line or input ends first.
fn string_body(cur: &mut Cursor<'_>) -> bool {
    loop {
        if cur.at_newline() {
            return false;
        }
        let Some(c) = cur.peek() else { return false };
        let r = cur.rest();
        if r.starts_with("$${") || r.starts_with("%%{") {
            cur.bump();
            cur.bump();
            cur.bump();
            continue;
        }
        if r.starts_with("${") || r.starts_with("%{") {
            cur.bump();
            cur.bump();
            if !template_body(cur) {
                return false;
            }
            continue;
        }
        match c {
            '"' => {
                cur.bump();
                return true;
            }
            '\\' => {
                cur.bump();
                if !cur.at_newline() {
                    cur.bump();
                }
            }
            _ => {
                cur.bump();
            }
        }
    }
}

/// Consumes an interpolation body through its closing brace.
fn template_body(cur: &mut Cursor<'_>) -> bool {
    let mut depth = 1usize;
    while let Some(c) = cur.peek() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    cur.bump();
                    return true;
                }
            }
            '"' => {
                cur.bump();
                if !string_body(cur) {
                    return false;
                }
                continue;
            }
            _ => {}
        }
        cur.bump();
    }
    false
}

/// Parses `<<MARK` or `<<-MARK` at the start of `rest`, which must be
/// followed by a line break. Returns (marker, header length in bytes).
pub(crate) fn heredoc_header(rest: &str) -> Option<(&str, usize)> {
    let after = rest.strip_prefix("<<")?;
    let (after, indent) = match after.strip_prefix('-') {
        Some(a) => (a, 1),
        None => (after, 0),
    };
    let first = after.chars().next()?;
    if !is_ident_start(first) {
        return None;
    }
    let len = after.find(|c: char| !is_ident_continue(c)).unwrap_or(after.len());
    let tail = &after[len..];
    if !(tail.starts_with('\n') || tail.starts_with("\r\n")) {
        return None;
    }
    Some((&after[..len], 2 + indent + len))
}

fn heredoc(cur: &mut Cursor<'_>) -> TokenKind {
    let (marker, header_len) = heredoc_header(cur.rest()).expect("caller checked header");
    let end = cur.pos + header_len;
    while cur.pos < end {
        cur.bump();
    }
    // consume the newline ending the header line
    if cur.peek() == Some('\r') {
        cur.bump();
    }
    cur.bump();
    loop {
        let line_end = cur.rest().find('\n').map_or(cur.src.len(), |i| cur.pos + i);
        let line = cur.src[cur.pos..line_end].trim_end_matches('\r');
        if line.trim() == marker {
            // the token ends at the end of the marker, leaving the newline
            let marker_end = cur.pos + line.len();
            while cur.pos < marker_end {
                cur.bump();
            }
            return TokenKind::Heredoc;
        }
        if line_end == cur.src.len() {
            while cur.bump().is_some() {}
            return TokenKind::Error(LexError::UnterminatedHeredoc);
        }
        while cur.pos <= line_end {
            cur.bump();
        }
    }
}

/// Reassembles the source from its tokens.
pub fn detokenize(tokens: &[Token<'_>]) -> String {
    let mut out = String::new();
    for t in tokens {
        out.push_str(t.leading);
        out.push_str(t.text);
    }
    out
}
