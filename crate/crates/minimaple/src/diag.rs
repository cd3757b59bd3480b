//! Diagnostics emitted by the parser and the type checker.

use std::fmt;

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Info => write!(f, "info"),
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// A single finding. `code` is a short stable string that tests and
/// tools can match on; `message` is for humans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn warning(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), span }
    }

    pub fn info(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Info, code, message: message.into(), span }
    }

    /// Render as `file:line:col: severity[code]: message`.
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            file, self.span.line, self.span.col, self.severity, self.code, self.message
        )
    }
}

/// Sort diagnostics into source-position order, keeping emission order
/// for ties so output is deterministic.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    let mut keyed: Vec<(usize, Diagnostic)> = diags.iter().cloned().enumerate().collect();
    keyed.sort_by_key(|(i, d)| (d.span.line, d.span.col, *i));
    for (slot, (_, d)) in diags.iter_mut().zip(keyed) {
        *slot = d;
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
