//! The `.mkv` model language: alphabets, automata and composition
//! expressions, with a parser, a canonical printer and an elaborator.
//!
//! ```text
//! alphabet A = { eps, t, r };
//! automaton Phil [A, A] {
//!   states: 1 2 3 4;
//!   1 -(eps|eps)-> 1 : 1/2;
//!   ...
//! }
//! system DF2 = unit(A) . ((Phil . Fork . Phil . Fork) x id(A)) . counit(A);
//! ```

use std::fmt;

pub mod ast;
mod elaborate;
mod lexer;
mod parser;
mod printer;

pub use ast::{AlphabetDecl, AutomatonDecl, Expr, ExprKind, Ident, Item, ModelDocument, Span, SystemDecl, TransitionDecl};
pub use elaborate::{declared_automaton, elaborate, elaborate_with, ElaborateOptions};
pub use parser::parse_model;
pub use printer::{print_expr, print_model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// A positioned message from parsing or elaboration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Self {
            span,
            severity: Severity::Error,
            message: message.into(),
        }
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {}: {}",
            self.span.line, self.span.col, self.severity, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.line, self.span.col, self.severity, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}
