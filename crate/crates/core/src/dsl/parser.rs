//! Recursive-descent parser for `.mkv` model files.
//!
//! After a syntax error the parser skips to the next `alphabet`, `automaton`
//! or `system` keyword and carries on, so a file with several broken items
//! reports all of them. A resolution pass then checks names, states and
//! symbols and puts transitions in canonical order.

use std::collections::{HashMap, HashSet};

use crate::algebra::ConstantKind;
use crate::alphabet::EPS;
use crate::scalar::{parse_rational, Rational};

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::Diagnostic;

type PResult<T> = Result<T, Diagnostic>;

const ITEM_KEYWORDS: [&str; 3] = ["alphabet", "automaton", "system"];

/// Parses and resolves a model document.
pub fn parse_model(src: &str) -> Result<ModelDocument, Vec<Diagnostic>> {
    let (tokens, mut errors) = lex(src);
    let mut parser = Parser { tokens, pos: 0 };
    let mut doc = ModelDocument::default();
    while !parser.at_eof() {
        match parser.item() {
            Ok(item) => doc.items.push(item),
            Err(d) => {
                errors.push(d);
                parser.recover();
            }
        }
    }
    if errors.is_empty() {
        errors.extend(resolve(&mut doc));
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        errors.sort_by_key(|d| d.span.start);
        Err(errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_tok(&self) -> &Tok {
        &self.peek().tok
    }

    fn nth_tok(&self, n: usize) -> &Tok {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)].tok
    }

    fn at_eof(&self) -> bool {
        *self.peek_tok() == Tok::Eof
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(
            t.span,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if *self.peek_tok() == tok {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.is_keyword(kw) {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek_tok().clone() {
            Tok::Ident(name) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// State names may be identifiers or integers.
    fn state_name(&mut self) -> PResult<Ident> {
        match self.peek_tok().clone() {
            Tok::Ident(name) | Tok::Int(name) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("state name")),
        }
    }

    fn recover(&mut self) {
        self.advance();
        while !self.at_eof() && !ITEM_KEYWORDS.iter().any(|k| self.is_keyword(k)) {
            self.advance();
        }
    }

    fn item(&mut self) -> PResult<Item> {
        if self.is_keyword("alphabet") {
            self.alphabet().map(Item::Alphabet)
        } else if self.is_keyword("automaton") {
            self.automaton().map(Item::Automaton)
        } else if self.is_keyword("system") {
            self.system().map(Item::System)
        } else {
            Err(self.unexpected("`alphabet`, `automaton` or `system`"))
        }
    }

    fn alphabet(&mut self) -> PResult<AlphabetDecl> {
        let start = self.expect_keyword("alphabet")?;
        let name = self.ident("alphabet name")?;
        self.expect(Tok::Eq, "`=`")?;
        let open = self.expect(Tok::LBrace, "`{`")?;
        if !self.is_keyword(EPS) {
            return Err(Diagnostic::error(
                open.to(self.peek().span),
                "alphabet must list eps",
            ));
        }
        self.advance();
        let mut symbols = Vec::new();
        while *self.peek_tok() == Tok::Comma {
            self.advance();
            let sym = self.ident("symbol name")?;
            if sym.name == EPS {
                return Err(Diagnostic::error(sym.span, "eps may be listed only once"));
            }
            symbols.push(sym);
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        let end = self.expect(Tok::Semi, "`;`")?;
        Ok(AlphabetDecl {
            name,
            symbols,
            span: start.to(end),
        })
    }

    fn automaton(&mut self) -> PResult<AutomatonDecl> {
        let start = self.expect_keyword("automaton")?;
        let name = self.ident("automaton name")?;
        self.expect(Tok::LBracket, "`[`")?;
        let left = self.ident("left alphabet name")?;
        self.expect(Tok::Comma, "`,`")?;
        let right = self.ident("right alphabet name")?;
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::LBrace, "`{`")?;
        self.expect_keyword("states")?;
        self.expect(Tok::Colon, "`:` after `states`")?;
        let mut states = vec![self.state_name()?];
        while *self.peek_tok() != Tok::Semi {
            states.push(self.state_name()?);
        }
        self.advance();
        let mut transitions = Vec::new();
        while *self.peek_tok() != Tok::RBrace {
            transitions.push(self.transition()?);
        }
        let end = self.advance().span;
        Ok(AutomatonDecl {
            name,
            left,
            right,
            states,
            transitions,
            span: start.to(end),
        })
    }

    fn transition(&mut self) -> PResult<TransitionDecl> {
        let from = self.state_name()?;
        self.expect(Tok::TransOpen, "`-(`")?;
        let left = self.ident("left symbol")?;
        self.expect(Tok::Pipe, "`|`")?;
        let right = self.ident("right symbol")?;
        self.expect(Tok::TransClose, "`)->`")?;
        let to = self.state_name()?;
        self.expect(Tok::Colon, "`:`")?;
        let weight = self.weight()?;
        let end = self.expect(Tok::Semi, "`;`")?;
        Ok(TransitionDecl {
            span: from.span.to(end),
            from,
            left,
            right,
            to,
            weight,
        })
    }

    fn weight(&mut self) -> PResult<Rational> {
        let t = self.advance();
        let text = match &t.tok {
            Tok::Int(n) if *self.peek_tok() == Tok::Slash => {
                self.advance();
                match self.advance().tok {
                    Tok::Int(d) => format!("{n}/{d}"),
                    _ => return Err(Diagnostic::error(self.prev_span(), "expected denominator")),
                }
            }
            Tok::Int(n) | Tok::Decimal(n) => n.clone(),
            other => {
                return Err(Diagnostic::error(
                    t.span,
                    format!("expected weight, found {}", other.describe()),
                ))
            }
        };
        parse_rational(&text)
            .ok_or_else(|| Diagnostic::error(t.span.to(self.prev_span()), format!("invalid weight `{text}`")))
    }

    fn system(&mut self) -> PResult<SystemDecl> {
        let start = self.expect_keyword("system")?;
        let name = self.ident("system name")?;
        self.expect(Tok::Eq, "`=`")?;
        let expr = self.expr()?;
        let end = self.expect(Tok::Semi, "`;`")?;
        Ok(SystemDecl {
            name,
            expr,
            span: start.to(end),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        while *self.peek_tok() == Tok::Dot {
            self.advance();
            let rhs = self.term()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Series(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        while self.is_keyword("x") {
            self.advance();
            let rhs = self.factor()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Parallel(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let mut base = self.primary()?;
        while *self.peek_tok() == Tok::Caret {
            self.advance();
            let t = self.advance();
            let k = match &t.tok {
                Tok::Int(n) => n
                    .parse::<u32>()
                    .map_err(|_| Diagnostic::error(t.span, format!("exponent `{n}` too large")))?,
                other => {
                    return Err(Diagnostic::error(
                        t.span,
                        format!("expected exponent, found {}", other.describe()),
                    ))
                }
            };
            let span = base.span.to(t.span);
            base = Expr {
                kind: ExprKind::Power(Box::new(base), k),
                span,
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.peek().span;
        match self.peek_tok().clone() {
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                let end = self.expect(Tok::RParen, "`)`")?;
                Ok(Expr {
                    kind: inner.kind,
                    span: start.to(end),
                })
            }
            Tok::Ident(name) if *self.nth_tok(1) == Tok::LParen && (name == "rel" || ConstantKind::from_keyword(&name).is_some()) => {
                self.advance();
                self.advance();
                let first = self.ident("alphabet name")?;
                let mut alphabets = vec![first];
                while *self.peek_tok() == Tok::Comma {
                    self.advance();
                    alphabets.push(self.ident("alphabet name")?);
                }
                let close = self.expect(Tok::RParen, "`)`")?;
                if name == "rel" {
                    self.relation_body(start, alphabets)
                } else {
                    let kind = ConstantKind::from_keyword(&name).expect("checked above");
                    let expected = if kind == ConstantKind::Swap { 2 } else { 1 };
                    if alphabets.len() != expected {
                        return Err(Diagnostic::error(
                            start.to(close),
                            format!("`{name}` takes {expected} alphabet(s), got {}", alphabets.len()),
                        ));
                    }
                    Ok(Expr {
                        kind: ExprKind::Constant(kind, alphabets),
                        span: start.to(close),
                    })
                }
            }
            Tok::Ident(name) if name == "x" => Err(self.unexpected("operand")),
            Tok::Ident(_) => {
                let id = self.ident("name")?;
                Ok(Expr {
                    span: id.span,
                    kind: ExprKind::Name(id),
                })
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn relation_body(&mut self, start: Span, alphabets: Vec<Ident>) -> PResult<Expr> {
        let [left, right]: [Ident; 2] = alphabets
            .try_into()
            .map_err(|_| Diagnostic::error(start.to(self.prev_span()), "`rel` takes 2 alphabets"))?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut pairs = vec![self.pair()?];
        while *self.peek_tok() == Tok::Comma {
            self.advance();
            pairs.push(self.pair()?);
        }
        let end = self.expect(Tok::RBrace, "`,` or `}`")?;
        Ok(Expr {
            kind: ExprKind::Relation { left, right, pairs },
            span: start.to(end),
        })
    }

    fn pair(&mut self) -> PResult<(Ident, Ident)> {
        self.expect(Tok::LParen, "`(`")?;
        let a = self.ident("symbol")?;
        self.expect(Tok::Comma, "`,`")?;
        let b = self.ident("symbol")?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((a, b))
    }
}

/// Checks names and references, and sorts each automaton's transitions by
/// (source, left symbol, right symbol, target) in declaration order.
fn resolve(doc: &mut ModelDocument) -> Vec<Diagnostic> {
    let mut errors = Vec::new();
    let mut alphabets: HashMap<String, Vec<String>> = HashMap::new();
    let mut automata: HashSet<String> = HashSet::new();
    let mut systems: HashSet<String> = HashSet::new();

    for item in &mut doc.items {
        match item {
            Item::Alphabet(a) => {
                let mut seen = HashSet::new();
                for s in &a.symbols {
                    if !seen.insert(&s.name) {
                        errors.push(Diagnostic::error(s.span, format!("duplicate symbol `{}`", s.name)));
                    }
                }
                let syms = std::iter::once(EPS.to_string())
                    .chain(a.symbols.iter().map(|s| s.name.clone()))
                    .collect();
                if alphabets.insert(a.name.name.clone(), syms).is_some() {
                    errors.push(Diagnostic::error(a.name.span, format!("duplicate alphabet `{}`", a.name)));
                }
            }
            Item::Automaton(a) => {
                if automata.contains(&a.name.name) || systems.contains(&a.name.name) {
                    errors.push(Diagnostic::error(a.name.span, format!("duplicate name `{}`", a.name)));
                }
                automata.insert(a.name.name.clone());
                errors.extend(resolve_automaton(a, &alphabets));
            }
            Item::System(s) => {
                if automata.contains(&s.name.name) || systems.contains(&s.name.name) {
                    errors.push(Diagnostic::error(s.name.span, format!("duplicate name `{}`", s.name)));
                }
                resolve_expr(&s.expr, &alphabets, &automata, &systems, &mut errors);
                systems.insert(s.name.name.clone());
            }
        }
    }
    errors
}

fn resolve_automaton(a: &mut AutomatonDecl, alphabets: &HashMap<String, Vec<String>>) -> Vec<Diagnostic> {
    let mut errors = Vec::new();
    let mut lookup_alphabet = |id: &Ident| {
        let found = alphabets.get(&id.name).cloned();
        if found.is_none() {
            errors.push(Diagnostic::error(id.span, format!("unknown alphabet `{}`", id.name)));
        }
        found
    };
    let left = lookup_alphabet(&a.left);
    let right = lookup_alphabet(&a.right);

    let mut state_pos: HashMap<&str, usize> = HashMap::new();
    for (i, s) in a.states.iter().enumerate() {
        if state_pos.insert(&s.name, i).is_some() {
            errors.push(Diagnostic::error(s.span, format!("duplicate state `{}`", s.name)));
        }
    }
    let (Some(left), Some(right)) = (left, right) else {
        return errors;
    };

    let mut keys = Vec::with_capacity(a.transitions.len());
    let mut seen = HashMap::new();
    for t in &a.transitions {
        let from = state_pos.get(t.from.name.as_str());
        let to = state_pos.get(t.to.name.as_str());
        for (id, pos) in [(&t.from, from), (&t.to, to)] {
            if pos.is_none() {
                errors.push(Diagnostic::error(id.span, format!("unknown state `{}` in automaton `{}`", id.name, a.name)));
            }
        }
        let l = left.iter().position(|s| *s == t.left.name);
        let r = right.iter().position(|s| *s == t.right.name);
        if l.is_none() {
            errors.push(Diagnostic::error(t.left.span, format!("symbol `{}` not in alphabet `{}`", t.left.name, a.left)));
        }
        if r.is_none() {
            errors.push(Diagnostic::error(t.right.span, format!("symbol `{}` not in alphabet `{}`", t.right.name, a.right)));
        }
        if let (Some(&f), Some(l), Some(r), Some(&to)) = (from, l, r, to) {
            let key = (f, l, r, to);
            if seen.insert(key, t.span).is_some() {
                errors.push(Diagnostic::error(
                    t.span,
                    format!(
                        "duplicate transition {} -({}|{})-> {}",
                        t.from, t.left, t.right, t.to
                    ),
                ));
            }
            keys.push(key);
        }
    }
    if errors.is_empty() {
        let mut indexed: Vec<_> = keys.into_iter().zip(a.transitions.drain(..)).collect();
        indexed.sort_by_key(|(k, _)| *k);
        a.transitions = indexed.into_iter().map(|(_, t)| t).collect();
    }
    errors
}

fn resolve_expr(
    e: &Expr,
    alphabets: &HashMap<String, Vec<String>>,
    automata: &HashSet<String>,
    systems: &HashSet<String>,
    errors: &mut Vec<Diagnostic>,
) {
    let check_alphabet = |id: &Ident, errors: &mut Vec<Diagnostic>| {
        if !alphabets.contains_key(&id.name) {
            errors.push(Diagnostic::error(id.span, format!("unknown alphabet `{}`", id.name)));
        }
    };
    match &e.kind {
        ExprKind::Name(id) => {
            if !automata.contains(&id.name) && !systems.contains(&id.name) {
                errors.push(Diagnostic::error(
                    id.span,
                    format!("unknown automaton or system `{}`", id.name),
                ));
            }
        }
        ExprKind::Series(a, b) | ExprKind::Parallel(a, b) => {
            resolve_expr(a, alphabets, automata, systems, errors);
            resolve_expr(b, alphabets, automata, systems, errors);
        }
        ExprKind::Power(a, _) => resolve_expr(a, alphabets, automata, systems, errors),
        ExprKind::Constant(_, ids) => ids.iter().for_each(|id| check_alphabet(id, errors)),
        ExprKind::Relation { left, right, pairs } => {
            check_alphabet(left, errors);
            check_alphabet(right, errors);
            for (side, alphabet) in [(0, left), (1, right)] {
                let Some(symbols) = alphabets.get(&alphabet.name) else {
                    continue;
                };
                for pair in pairs {
                    let id = if side == 0 { &pair.0 } else { &pair.1 };
                    if !symbols.contains(&id.name) {
                        errors.push(Diagnostic::error(
                            id.span,
                            format!("symbol `{}` not in alphabet `{}`", id.name, alphabet.name),
                        ));
                    }
                }
            }
        }
    }
}
