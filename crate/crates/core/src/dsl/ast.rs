use std::fmt;

use crate::algebra::ConstantKind;
use crate::scalar::Rational;

/// Source location of an AST node or diagnostic.
///
/// Spans never take part in AST equality: two nodes compare equal when
/// their contents do, wherever they were parsed from.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Span {
    /// Smallest span covering both.
    pub fn to(self, other: Span) -> Span {
        if other.end >= self.end {
            Span {
                end: other.end,
                ..self
            }
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            span: Span::default(),
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelDocument {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Alphabet(AlphabetDecl),
    Automaton(AutomatonDecl),
    System(SystemDecl),
}

/// `alphabet A = { eps, t, r };` — `symbols` excludes the leading `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphabetDecl {
    pub name: Ident,
    pub symbols: Vec<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonDecl {
    pub name: Ident,
    pub left: Ident,
    pub right: Ident,
    pub states: Vec<Ident>,
    pub transitions: Vec<TransitionDecl>,
    pub span: Span,
}

/// `from -(left|right)-> to : weight;`
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDecl {
    pub from: Ident,
    pub left: Ident,
    pub right: Ident,
    pub to: Ident,
    pub weight: Rational,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDecl {
    pub name: Ident,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Name(Ident),
    /// `e1 . e2`
    Series(Box<Expr>, Box<Expr>),
    /// `e1 x e2`
    Parallel(Box<Expr>, Box<Expr>),
    /// `e ^ k`
    Power(Box<Expr>, u32),
    /// `id(A)`, `swap(A, B)`, ...
    Constant(ConstantKind, Vec<Ident>),
    /// `rel(A, B) { (a, b), ... }`
    Relation {
        left: Ident,
        right: Ident,
        pairs: Vec<(Ident, Ident)>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Self {
            kind,
            span: Span::default(),
        }
    }

    pub fn name(n: &str) -> Self {
        Self::new(ExprKind::Name(Ident::new(n)))
    }

    pub fn series(a: Expr, b: Expr) -> Self {
        Self::new(ExprKind::Series(Box::new(a), Box::new(b)))
    }

    pub fn parallel(a: Expr, b: Expr) -> Self {
        Self::new(ExprKind::Parallel(Box::new(a), Box::new(b)))
    }

    pub fn constant(kind: ConstantKind, alphabets: &[&str]) -> Self {
        Self::new(ExprKind::Constant(
            kind,
            alphabets.iter().map(|a| Ident::new(*a)).collect(),
        ))
    }
}

impl ModelDocument {
    pub fn alphabets(&self) -> impl Iterator<Item = &AlphabetDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Alphabet(a) => Some(a),
            _ => None,
        })
    }

    pub fn automata(&self) -> impl Iterator<Item = &AutomatonDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Automaton(a) => Some(a),
            _ => None,
        })
    }

    pub fn systems(&self) -> impl Iterator<Item = &SystemDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::System(s) => Some(s),
            _ => None,
        })
    }

    pub fn alphabet(&self, name: &str) -> Option<&AlphabetDecl> {
        self.alphabets().find(|a| a.name.name == name)
    }

    pub fn automaton(&self, name: &str) -> Option<&AutomatonDecl> {
        self.automata().find(|a| a.name.name == name)
    }

    pub fn system(&self, name: &str) -> Option<&SystemDecl> {
        self.systems().find(|s| s.name.name == name)
    }
}
