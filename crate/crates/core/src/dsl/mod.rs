//! The network description language: lexer, parser, pretty-printer and loader.
//!
//! A program is a sequence of `;`-terminated statements. Parsing only checks
//! syntax and duplicate names; [`load`] resolves names against the signature
//! and builds the initial matrix, and [`validate`] reports the same checks as
//! data.

pub mod ast;
pub mod lexer;
mod loader;
pub mod parser;

use std::fmt;

pub use ast::{
    Binding as PortBinding, ConstLit, MaskEntry, MaskLit, Member, Operand, Path, PortSpec, Program, Statement,
    Stmt,
};
pub use loader::{load, validate, Network};
pub use parser::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, span, message: message.into() }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, span, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {level}: {}", self.span.line, self.span.column, self.message)
    }
}

/// One or more diagnostics, at least one of which is an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DslError {
    pub diagnostics: Vec<Diagnostic>,
}

impl DslError {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }
}

impl From<Diagnostic> for DslError {
    fn from(d: Diagnostic) -> Self {
        DslError { diagnostics: vec![d] }
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in self.errors() {
            if !first {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

impl std::error::Error for DslError {}
