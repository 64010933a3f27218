// SPDX-License-Identifier: Apache-2.0

//! Source positions.
//!
//! Lines and columns are 1-based and count characters, not bytes. The end
//! position is exclusive: it names the column just past the last character.
//! Byte offsets into the original text are carried alongside so callers can
//! slice the source without recomputing positions.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Opaque identifier for a file within one scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FileId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SourceSpan {
    #[serde(skip)]
    pub file_id: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub start_byte: usize,
    pub end_byte: usize,
}

impl SourceSpan {
    /// Smallest span covering both `self` and `other`.
    pub fn cover(self, other: SourceSpan) -> SourceSpan {
        let (start_line, start_col, start_byte) = if self.start_byte <= other.start_byte {
            (self.start_line, self.start_col, self.start_byte)
        } else {
            (other.start_line, other.start_col, other.start_byte)
        };
        let (end_line, end_col, end_byte) = if self.end_byte >= other.end_byte {
            (self.end_line, self.end_col, self.end_byte)
        } else {
            (other.end_line, other.end_col, other.end_byte)
        };
        SourceSpan { file_id: self.file_id, start_line, start_col, end_line, end_col, start_byte, end_byte }
    }

    /// The text covered by this span.
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start_byte..self.end_byte]
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start_byte <= other.start_byte && other.end_byte <= self.end_byte
    }

    pub fn is_well_formed(&self) -> bool {
        (self.start_line, self.start_col) <= (self.end_line, self.end_col) && self.start_byte <= self.end_byte
    }
}

/// Maps byte offsets to line/column positions for one text.
///
/// A leading byte-order mark is skipped when counting columns, matching the
/// lexer.
#[derive(Debug, Clone)]
pub struct LineIndex<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
    file_id: FileId,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str, file_id: FileId) -> Self {
        let mut line_starts = alloc::vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex { text, line_starts, file_id }
    }

    /// Line and column of a byte offset. Offsets inside a multi-byte
    /// character are rounded down to its start.
    pub fn position(&self, byte: usize) -> (u32, u32) {
        let byte = byte.min(self.text.len());
        let line = match self.line_starts.binary_search(&byte) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let mut start = self.line_starts[line];
        if line == 0 && self.text.starts_with('\u{feff}') {
            start = byte.min(3);
        }
        let col = self.text[start..]
            .char_indices()
            .take_while(|(i, _)| start + i < byte)
            .count();
        (line as u32 + 1, col as u32 + 1)
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let (start_line, start_col) = self.position(start);
        let (end_line, end_col) = self.position(end);
        SourceSpan {
            file_id: self.file_id,
            start_line,
            start_col,
            end_line,
            end_col,
            start_byte: start,
            end_byte: end,
        }
    }

    /// Span of the whole text.
    pub fn whole(&self) -> SourceSpan {
        self.span(0, self.text.len())
    }
}
