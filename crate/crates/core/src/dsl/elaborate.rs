use std::collections::HashMap;

use crate::algebra::{automata_identical, parallel_markov, relation_automaton, series_markov, series_weighted, standard_constant, Relation};
use crate::alphabet::{Alphabet, StateLabel, Symbol};
use crate::automaton::{MarkovAutomaton, WeightedAutomaton};
use crate::error::Error;
use crate::scalar::Scalar;

use super::ast::*;
use super::Diagnostic;

type EResult<T> = Result<T, Diagnostic>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElaborateOptions {
    /// Also compose every series chain pairwise with normalization after each
    /// step, and fail unless both results are identical.
    pub stepwise_check: bool,
    /// Largest interface a power may materialize.
    pub max_power_symbols: usize,
}

impl Default for ElaborateOptions {
    fn default() -> Self {
        Self {
            stepwise_check: false,
            max_power_symbols: 64,
        }
    }
}

/// Evaluates the named system of `doc` into a Markov automaton.
pub fn elaborate<S: Scalar>(doc: &ModelDocument, system: &str) -> EResult<MarkovAutomaton<S>> {
    elaborate_with(doc, system, ElaborateOptions::default())
}

pub fn elaborate_with<S: Scalar>(
    doc: &ModelDocument,
    system: &str,
    options: ElaborateOptions,
) -> EResult<MarkovAutomaton<S>> {
    let mut env = Env {
        doc,
        options,
        alphabets: HashMap::new(),
        automata: HashMap::new(),
        systems: HashMap::new(),
    };
    env.alphabets = declared_alphabets(doc)?;
    env.system(system, Span::default())
}

fn declared_alphabets(doc: &ModelDocument) -> EResult<HashMap<&str, Alphabet>> {
    doc.alphabets()
        .map(|a| {
            Alphabet::atomic(&a.name.name, a.symbols.iter().map(|s| s.name.clone()))
                .map(|alphabet| (a.name.name.as_str(), alphabet))
                .map_err(|e| Diagnostic::error(a.span, e.to_string()))
        })
        .collect()
}

/// The declared automaton `name` as written, without requiring it to be
/// Markov (or even valid); see [`WeightedAutomaton::validate`].
pub fn declared_automaton<S: Scalar>(doc: &ModelDocument, name: &str) -> EResult<WeightedAutomaton<S>> {
    let decl = doc
        .automaton(name)
        .ok_or_else(|| Diagnostic::error(Span::default(), format!("no automaton named `{name}`")))?;
    build_weighted(decl, &declared_alphabets(doc)?)
}

fn build_weighted<S: Scalar>(decl: &AutomatonDecl, alphabets: &HashMap<&str, Alphabet>) -> EResult<WeightedAutomaton<S>> {
    let alphabet = |id: &Ident| {
        alphabets
            .get(id.name.as_str())
            .cloned()
            .ok_or_else(|| Diagnostic::error(id.span, format!("unknown alphabet `{}`", id.name)))
    };
    let left = alphabet(&decl.left)?;
    let right = alphabet(&decl.right)?;
    let state_pos: HashMap<&str, usize> =
        decl.states.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
    let lookup = |id: &Ident, alphabet: &Alphabet| {
        alphabet
            .index_of(&Symbol::atom(id.name.clone()))
            .ok_or_else(|| Diagnostic::error(id.span, format!("symbol `{id}` not in alphabet {}", alphabet.describe())))
    };
    let state = |id: &Ident| {
        state_pos
            .get(id.name.as_str())
            .copied()
            .ok_or_else(|| Diagnostic::error(id.span, format!("unknown state `{id}`")))
    };
    let transitions = decl
        .transitions
        .iter()
        .map(|t| {
            Ok((
                lookup(&t.left, &left)?,
                lookup(&t.right, &right)?,
                state(&t.from)?,
                state(&t.to)?,
                S::from_rational(&t.weight),
            ))
        })
        .collect::<EResult<Vec<_>>>()?;
    let states = decl.states.iter().map(|s| StateLabel::atom(s.name.clone())).collect();
    WeightedAutomaton::from_transitions(left, right, states, transitions)
        .map_err(|e| Diagnostic::error(decl.span, e.to_string()))
}

struct Env<'d, S> {
    doc: &'d ModelDocument,
    options: ElaborateOptions,
    alphabets: HashMap<&'d str, Alphabet>,
    automata: HashMap<&'d str, MarkovAutomaton<S>>,
    systems: HashMap<&'d str, MarkovAutomaton<S>>,
}

impl<'d, S: Scalar> Env<'d, S> {
    fn alphabet(&self, id: &Ident) -> EResult<&Alphabet> {
        self.alphabets
            .get(id.name.as_str())
            .ok_or_else(|| Diagnostic::error(id.span, format!("unknown alphabet `{}`", id.name)))
    }

    fn system(&mut self, name: &str, at: Span) -> EResult<MarkovAutomaton<S>> {
        if let Some(m) = self.systems.get(name) {
            return Ok(m.clone());
        }
        let doc = self.doc;
        let decl = doc
            .system(name)
            .ok_or_else(|| Diagnostic::error(at, format!("no system named `{name}`")))?;
        let m = self.expr(&decl.expr)?;
        self.systems.insert(decl.name.name.as_str(), m.clone());
        Ok(m)
    }

    fn automaton(&mut self, decl: &'d AutomatonDecl) -> EResult<MarkovAutomaton<S>> {
        if let Some(m) = self.automata.get(decl.name.name.as_str()) {
            return Ok(m.clone());
        }
        let w = build_weighted(decl, &self.alphabets)?;
        let m = MarkovAutomaton::new(w).map_err(|e| {
            Diagnostic::error(
                decl.name.span,
                format!("automaton `{}` is not a Markov automaton: {e}", decl.name),
            )
        })?;
        self.automata.insert(decl.name.name.as_str(), m.clone());
        Ok(m)
    }

    fn expr(&mut self, e: &Expr) -> EResult<MarkovAutomaton<S>> {
        match &e.kind {
            ExprKind::Name(id) => {
                if let Some(decl) = self.doc.automaton(&id.name) {
                    self.automaton(decl)
                } else {
                    self.system(&id.name, id.span)
                }
            }
            ExprKind::Series(..) => {
                let mut chain = Vec::new();
                flatten_series(e, &mut chain);
                self.series_chain(&chain)
            }
            ExprKind::Parallel(a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                Ok(parallel_markov(&a, &b))
            }
            ExprKind::Power(a, k) => {
                let base = self.expr(a)?;
                base.power(*k as usize, self.options.max_power_symbols)
                    .map_err(|err| match err {
                        Error::PowerTooLarge { symbols, limit } => Diagnostic::error(
                            e.span,
                            format!("power ^{k} needs an interface of {symbols} symbols, more than the limit of {limit}"),
                        ),
                        other => Diagnostic::error(e.span, other.to_string()),
                    })
            }
            ExprKind::Constant(kind, ids) => {
                let a = self.alphabet(&ids[0])?.clone();
                let b = ids.get(1).map(|id| self.alphabet(id)).transpose()?;
                standard_constant(*kind, &a, b).map_err(|err| Diagnostic::error(e.span, err.to_string()))
            }
            ExprKind::Relation { left, right, pairs } => {
                let l = self.alphabet(left)?.clone();
                let r = self.alphabet(right)?.clone();
                let pairs: Vec<_> = pairs
                    .iter()
                    .map(|(a, b)| (Symbol::atom(a.name.clone()), Symbol::atom(b.name.clone())))
                    .collect();
                let rel = Relation::new(l, r, pairs).map_err(|err| Diagnostic::error(e.span, err.to_string()))?;
                Ok(relation_automaton(&rel))
            }
        }
    }

    /// `e1 . e2 . ... . en`: weighted composition left to right, then a
    /// single normalization.
    fn series_chain(&mut self, chain: &[&Expr]) -> EResult<MarkovAutomaton<S>> {
        let parts = chain.iter().map(|e| self.expr(e)).collect::<EResult<Vec<_>>>()?;
        for (i, pair) in parts.windows(2).enumerate() {
            let (q, r) = (&pair[0], &pair[1]);
            if !q.right().same_symbols(r.left()) {
                return Err(Diagnostic::error(
                    chain[0].span.to(chain[i + 1].span),
                    format!(
                        "interface mismatch in series composition: left side ends in {}, right side starts with {}",
                        q.right().describe(),
                        r.left().describe()
                    ),
                ));
            }
        }
        let span = chain[0].span.to(chain[chain.len() - 1].span);
        let fail = |err: Error| Diagnostic::error(span, err.to_string());
        let mut acc = parts[0].as_weighted().clone();
        for r in &parts[1..] {
            acc = series_weighted(&acc, r).map_err(fail)?;
        }
        let result = acc.normalize().map_err(fail)?;
        if self.options.stepwise_check {
            let mut step = parts[0].clone();
            for r in &parts[1..] {
                step = series_markov(&step, r).map_err(fail)?;
            }
            if !automata_identical(&step, &result) {
                return Err(Diagnostic::error(
                    span,
                    "stepwise and single-normalization composition disagree",
                ));
            }
        }
        Ok(result)
    }
}

fn flatten_series<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match &e.kind {
        ExprKind::Series(a, b) => {
            flatten_series(a, out);
            flatten_series(b, out);
        }
        _ => out.push(e),
    }
}
