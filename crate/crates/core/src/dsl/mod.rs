//! The `.ioa` description format: lexer, parser, canonical printer, model
//! resolution and DOT export.

mod ast;
mod dot;
mod emit;
mod lexer;
mod parser;
mod print;
mod resolve;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use ast::*;
pub use dot::{export_dot, DotSource};
pub use emit::{automaton_decl, document, rules_decl, system_decl};
pub use parser::parse;
pub use print::serialize;
pub use resolve::{Model, ModelError, ProcessDef, ProtocolDef, RulesDef};

pub const FORMAT_VERSION: u32 = 1;

/// Byte offsets plus the 1-based line and column of `start`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Span {
    /// The smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        if other.start < self.start {
            return other.join(self);
        }
        Span {
            start: self.start,
            end: self.end.max(other.end),
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A node and where it came from. Equality ignores the span.
#[derive(Debug, Clone, Serialize)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Self { node, span }
    }

    /// A node without a source position, for built documents.
    pub fn bare(node: T) -> Self {
        Self {
            node,
            span: Span::default(),
        }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T: Eq> Eq for Spanned<T> {}

impl<T> std::ops::Deref for Spanned<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.node
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Resolution,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {kind:?} error: {message}")]
pub struct DslError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
}

impl DslError {
    pub(crate) fn new(kind: ErrorKind, span: Span, message: impl Into<String>) -> Self {
        Self {
            kind,
            span,
            message: message.into(),
        }
    }
}

/// Render errors with the offending source line.
pub fn render_errors(source: &str, file: &str, errors: &[DslError]) -> String {
    let mut out = String::new();
    for e in errors {
        out.push_str(&format!("{file}:{e}\n"));
        if let Some(line) = source.lines().nth(e.span.line.saturating_sub(1)) {
            out.push_str(&format!("  | {line}\n"));
            out.push_str(&format!(
                "  | {}^\n",
                " ".repeat(e.span.column.saturating_sub(1))
            ));
        }
    }
    out
}
