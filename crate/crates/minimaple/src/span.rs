//! Source positions for diagnostics and annotations.

use std::fmt;

/// A contiguous region of source text, 1-based line/column plus a
/// character count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub fn new(line: u32, col: u32, len: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        Span { line, col, len }
    }

    /// A span that points at nothing, used for synthesized nodes.
    pub fn dummy() -> Self {
        Span { line: 1, col: 1, len: 0 }
    }

    /// Keeps the earlier start point of the two spans.
    pub fn merge(self, other: Span) -> Span {
        if (other.line, other.col) < (self.line, self.col) {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A named source file together with its text, the unit of parsing
/// and checking.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile { path: path.into(), text: text.into() }
    }

    /// Number of lines, counting a trailing partial line.
    pub fn line_count(&self) -> u32 {
        (self.text.lines().count() as u32).max(1)
    }

    /// True if `span` lies within the bounds of this file.
    pub fn contains(&self, span: Span) -> bool {
        if span.line < 1 || span.col < 1 {
            return false;
        }
        match self.text.lines().nth(span.line as usize - 1) {
            Some(line) => {
                let width = line.chars().count() as u32;
                // A zero-length span may sit one past the end (EOF markers).
                span.col - 1 + span.len <= width + 1
            }
            None => span.line <= self.line_count() && span.col == 1,
        }
    }
}
