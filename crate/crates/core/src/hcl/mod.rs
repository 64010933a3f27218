// SPDX-License-Identifier: Apache-2.0

//! Terraform-flavoured HCL: tokens, syntax tree and parser.

mod ast;
mod lexer;
mod parser;

pub use ast::{
    Attribute, Block, BodyItem, Comment, ConfigFile, Diagnostic, ExpressionValue, Number, Severity, TemplatePart,
};
pub use lexer::{detokenize, tokenize, LexError, Token, TokenKind};
pub use parser::{parse, parse_with_id};

/// The value of `name` in `block`; the last assignment wins.
pub fn get_attribute<'a>(block: &'a Block, name: &str) -> Option<&'a ExpressionValue> {
    block.get_attribute(name)
}

/// Blocks of `block_type` in `file`, in source order.
pub fn find_blocks<'a>(
    file: &'a ConfigFile,
    block_type: &str,
    labels: Option<&[&str]>,
    nested: bool,
) -> alloc::vec::Vec<&'a Block> {
    file.find_blocks(block_type, labels, nested)
}
