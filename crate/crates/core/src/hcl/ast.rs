// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

/// A numeric literal, kept as written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Number {
    pub raw: String,
}

impl Number {
    pub fn as_f64(&self) -> Option<f64> {
        self.raw.parse().ok()
    }

    /// The value as an integer, when it is written as one.
    pub fn as_i64(&self) -> Option<i64> {
        self.raw.parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TemplatePart {
    Literal(String),
    Reference(Vec<String>),
    /// An interpolation or directive that is not a plain reference.
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ExpressionValue {
    String(String),
    Number(Number),
    Bool(bool),
    List(Vec<ExpressionValue>),
    /// Object constructor; keys in source order.
    Map(Vec<(String, ExpressionValue)>),
    /// Traversal such as `aws_instance.web.id`. Never empty.
    Reference(Vec<String>),
    Template(Vec<TemplatePart>),
    /// Any other expression, as written.
    Opaque(String),
}

impl ExpressionValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            ExpressionValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            ExpressionValue::Number(n) => Some(n),
            _ => None,
        }
    }

    /// Calls `f` for every reference reachable from this value, including
    /// references inside templates and nested collections.
    pub fn for_each_reference<'a>(&'a self, f: &mut dyn FnMut(&'a [String])) {
        match self {
            ExpressionValue::Reference(segs) => f(segs),
            ExpressionValue::List(items) => items.iter().for_each(|v| v.for_each_reference(f)),
            ExpressionValue::Map(entries) => entries.iter().for_each(|(_, v)| v.for_each_reference(f)),
            ExpressionValue::Template(parts) => {
                for p in parts {
                    if let TemplatePart::Reference(segs) = p {
                        f(segs);
                    }
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub value: ExpressionValue,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub block_type: String,
    pub labels: Vec<String>,
    pub body: Vec<BodyItem>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum BodyItem {
    Block(Block),
    Attribute(Attribute),
}

impl BodyItem {
    pub fn span(&self) -> SourceSpan {
        match self {
            BodyItem::Block(b) => b.span,
            BodyItem::Attribute(a) => a.span,
        }
    }

    pub fn as_block(&self) -> Option<&Block> {
        match self {
            BodyItem::Block(b) => Some(b),
            BodyItem::Attribute(_) => None,
        }
    }

    pub fn as_attribute(&self) -> Option<&Attribute> {
        match self {
            BodyItem::Attribute(a) => Some(a),
            BodyItem::Block(_) => None,
        }
    }

    /// Copy with every span reset, for comparing structure only.
    pub fn without_spans(&self) -> BodyItem {
        match self {
            BodyItem::Block(b) => BodyItem::Block(b.without_spans()),
            BodyItem::Attribute(a) => BodyItem::Attribute(Attribute { span: SourceSpan::default(), ..a.clone() }),
        }
    }
}

impl Block {
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.body.iter().filter_map(BodyItem::as_block)
    }

    pub fn attributes(&self) -> impl Iterator<Item = &Attribute> {
        self.body.iter().filter_map(BodyItem::as_attribute)
    }

    /// The value of `name`. When the attribute is assigned more than once
    /// the last assignment wins.
    pub fn get_attribute(&self, name: &str) -> Option<&ExpressionValue> {
        self.get_attribute_node(name).map(|a| &a.value)
    }

    pub fn get_attribute_node(&self, name: &str) -> Option<&Attribute> {
        self.attributes().filter(|a| a.name == name).last()
    }

    pub fn has_block(&self, block_type: &str) -> bool {
        self.blocks().any(|b| b.block_type == block_type)
    }

    /// `type.name` for blocks with two labels, such as resources.
    pub fn address(&self) -> Option<String> {
        match self.labels.as_slice() {
            [a, b, ..] => Some(alloc::format!("{a}.{b}")),
            _ => None,
        }
    }

    pub fn without_spans(&self) -> Block {
        Block {
            block_type: self.block_type.clone(),
            labels: self.labels.clone(),
            body: self.body.iter().map(BodyItem::without_spans).collect(),
            span: SourceSpan::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub line: u32,
    pub text: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub path: String,
    pub body: Vec<BodyItem>,
    pub diagnostics: Vec<Diagnostic>,
    /// Comments, keyed by the line they start on. Not part of `body`.
    pub comments: Vec<Comment>,
    /// Span of the whole file.
    pub span: SourceSpan,
}

impl ConfigFile {
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.body.iter().filter_map(BodyItem::as_block)
    }

    /// Blocks of `block_type` in source order.
    ///
    /// `labels`, when given, must match the leading labels of a block.
    /// With `nested` set the search descends into block bodies.
    pub fn find_blocks(&self, block_type: &str, labels: Option<&[&str]>, nested: bool) -> Vec<&Block> {
        let mut out = Vec::new();
        collect_blocks(&self.body, block_type, labels, nested, &mut out);
        out
    }

    /// Top-level `resource` blocks with both labels present.
    pub fn resources(&self) -> impl Iterator<Item = &Block> {
        self.blocks().filter(|b| b.block_type == "resource" && b.labels.len() >= 2)
    }

    pub fn comments_on_line(&self, line: u32) -> impl Iterator<Item = &Comment> {
        self.comments.iter().filter(move |c| c.line == line)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

fn collect_blocks<'a>(
    body: &'a [BodyItem],
    block_type: &str,
    labels: Option<&[&str]>,
    nested: bool,
    out: &mut Vec<&'a Block>,
) {
    for block in body.iter().filter_map(BodyItem::as_block) {
        let label_ok = labels.is_none_or(|want| {
            want.len() <= block.labels.len() && want.iter().zip(&block.labels).all(|(w, l)| *w == l)
        });
        if block.block_type == block_type && label_ok {
            out.push(block);
        }
        if nested {
            collect_blocks(&block.body, block_type, labels, nested, out);
        }
    }
}
