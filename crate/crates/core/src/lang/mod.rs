//! The `.fti` specification language: lexer, parser, resolver, lints and
//! canonical rendering.

use std::fmt;
use std::sync::Arc;

pub mod ast;
pub mod lexer;
pub mod lint;
pub mod parser;
pub mod render;
pub mod resolve;

pub use ast::SpecModule;
pub use lint::lint;
pub use parser::{parse, parse_expression, parse_files, parse_members, parse_rename_rules};
pub use render::render_environment;
pub use resolve::{resolve, Catalog, CheckOutcome, Environment, NamedArchitecture, NamedInterface, ResolveOptions};

/// Position of a token: 1-based line and column (in characters).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(file: Arc<str>, line: u32, col: u32) -> Self {
        Span { file, line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub span: Span,
    pub severity: Severity,
    pub message: String,
    /// Set for arithmetic overflow and similar limits rather than mistakes in the input.
    pub capacity: bool,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            severity: Severity::Error,
            message: message.into(),
            capacity: false,
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(span, message)
        }
    }

    /// Converts an algebra error raised while evaluating the construct at `span`.
    pub fn from_error(span: Span, error: &crate::error::Error) -> Self {
        Diagnostic {
            capacity: error.is_capacity(),
            ..Diagnostic::error(span, error.to_string())
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.severity.as_str(), self.message)
    }
}

impl std::error::Error for Diagnostic {}
