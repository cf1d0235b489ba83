//! Interface alphabets, symbols and state labels.
//!
//! Composite symbols and state labels are flat tuples of atoms: the product
//! of `(a, b)` with `c` is `(a, b, c)`, not `((a, b), c)`. With row-major
//! ordering of products this makes `(A x C) x E` and `A x (C x E)` the same
//! alphabet, symbol for symbol.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Error;

type Result<T> = crate::error::Result<T>;

/// Name of the designated null signal in every atomic alphabet.
pub const EPS: &str = "eps";

/// A flat tuple of atom names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Vec<String>);

impl Symbol {
    pub fn atom(name: impl Into<String>) -> Self {
        Symbol(vec![name.into()])
    }

    pub fn tuple(parts: &[Symbol]) -> Self {
        Symbol(parts.iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    pub fn atoms(&self) -> &[String] {
        &self.0
    }

    /// Parses the display form: `a`, `(a,b,c)` or `()`.
    pub fn parse(s: &str) -> Self {
        Symbol(parse_tuple(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(&self.0, "()", f)
    }
}

/// Label of a state; composite states carry the concatenated component labels.
/// One-state constants contribute no atoms, so they vanish from composite labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateLabel(Vec<String>);

impl StateLabel {
    pub fn atom(name: impl Into<String>) -> Self {
        StateLabel(vec![name.into()])
    }

    /// The label of the single state of a relation constant.
    pub fn unit() -> Self {
        StateLabel(Vec::new())
    }

    pub fn from_parts<I, T>(parts: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        StateLabel(parts.into_iter().map(Into::into).collect())
    }

    pub fn concat(&self, other: &StateLabel) -> Self {
        StateLabel(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn parts(&self) -> &[String] {
        &self.0
    }

    /// Parses the display form: `1`, `(1,3,3,2)` or `*`.
    pub fn parse(s: &str) -> Self {
        if s.trim() == "*" {
            return Self::unit();
        }
        StateLabel(parse_tuple(s))
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(&self.0, "*", f)
    }
}

fn fmt_tuple(parts: &[String], empty: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match parts {
        [] => f.write_str(empty),
        [one] => f.write_str(one),
        many => write!(f, "({})", many.join(",")),
    }
}

fn parse_tuple(s: &str) -> Vec<String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s);
    inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(String::from)
        .collect()
}

/// A finite ordered set of symbols with one designated null symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    symbols: Vec<Symbol>,
    epsilon: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, symbols: Vec<Symbol>, epsilon: usize) -> Result<Self> {
        let name = name.into();
        if epsilon >= symbols.len() {
            return Err(Error::Invalid(format!(
                "alphabet {name}: null symbol index {epsilon} out of range"
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::Invalid(format!(
                    "alphabet {name}: duplicate symbol {s}"
                )));
            }
        }
        Ok(Self {
            name,
            symbols,
            epsilon,
        })
    }

    /// An atomic alphabet `{eps, others...}` with `eps` first.
    pub fn atomic<I, T>(name: impl Into<String>, others: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut symbols = vec![Symbol::atom(EPS)];
        symbols.extend(others.into_iter().map(|s| Symbol::atom(s)));
        Self::new(name, symbols, 0)
    }

    /// The one-symbol alphabet `{eps}` used by closed interfaces.
    pub fn trivial() -> Self {
        Self {
            name: "I".into(),
            symbols: vec![Symbol::atom(EPS)],
            epsilon: 0,
        }
    }

    /// Row-major product: index of `(a, c)` is `a * other.len() + c`.
    pub fn product(&self, other: &Alphabet) -> Self {
        let symbols = self
            .symbols
            .iter()
            .flat_map(|a| other.symbols.iter().map(move |c| Symbol::tuple(&[a.clone(), c.clone()])))
            .collect();
        Self {
            name: format!("{}x{}", self.name, other.name),
            symbols,
            epsilon: self.epsilon * other.len() + other.epsilon,
        }
    }

    /// `k`-fold product; `power(0)` is the one-symbol alphabet `{()}`.
    pub fn power(&self, k: usize) -> Self {
        let mut out = Self {
            name: format!("{}^{k}", self.name),
            symbols: vec![Symbol(Vec::new())],
            epsilon: 0,
        };
        for _ in 0..k {
            let next = out.product(self);
            out.symbols = next.symbols;
            out.epsilon = next.epsilon;
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn epsilon_index(&self) -> usize {
        self.epsilon
    }

    pub fn epsilon(&self) -> &Symbol {
        &self.symbols[self.epsilon]
    }

    pub fn is_singleton(&self) -> bool {
        self.symbols.len() == 1
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.symbols.iter().position(|x| x == s)
    }

    pub fn require_index(&self, s: &Symbol) -> Result<usize> {
        self.index_of(s).ok_or_else(|| Error::UnknownSymbol {
            symbol: s.to_string(),
            alphabet: self.describe(),
        })
    }

    /// Interface compatibility: same symbol list and same null symbol.
    /// The alphabet name is not compared.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols && self.epsilon == other.epsilon
    }

    /// Human-readable form, e.g. `A = {eps, t, r}`.
    pub fn describe(&self) -> String {
        let syms: Vec<String> = self.symbols.iter().map(Symbol::to_string).collect();
        format!("{} = {{{}}}", self.name, syms.join(", "))
    }

    /// Index map into `other` given a symbol correspondence.
    pub fn bijection_to(&self, other: &Alphabet, f: impl Fn(&Symbol) -> Symbol) -> Result<Vec<usize>> {
        self.symbols
            .iter()
            .map(|s| {
                let image = f(s);
                other.index_of(&image).ok_or_else(|| {
                    Error::NonBijective(format!("{image} not in {}", other.describe()))
                })
            })
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Serialize for StateLabel {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl Serialize for Symbol {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_is_row_major_and_flat() {
        let a = Alphabet::atomic("A", ["t", "r"]).unwrap();
        let p = a.product(&a);
        assert_eq!(p.len(), 9);
        assert_eq!(p.epsilon().to_string(), "(eps,eps)");
        assert_eq!(p.symbol(1).to_string(), "(eps,t)");
        assert_eq!(p.symbol(3).to_string(), "(t,eps)");
        assert!(p.product(&a).same_symbols(&a.product(&p)));
    }

    #[test]
    fn power_alphabet() {
        let a = Alphabet::atomic("A", ["t"]).unwrap();
        let p0 = a.power(0);
        assert_eq!(p0.len(), 1);
        assert_eq!(p0.epsilon().to_string(), "()");
        let p2 = a.power(2);
        assert_eq!(p2.len(), 4);
        assert_eq!(p2.epsilon().to_string(), "(eps,eps)");
    }

    #[test]
    fn rejects_duplicates() {
        assert!(Alphabet::atomic("A", ["t", "t"]).is_err());
    }

    #[test]
    fn label_round_trip() {
        for s in ["*", "1", "(1,3,3,2)"] {
            assert_eq!(StateLabel::parse(s).to_string(), s);
        }
        for s in ["eps", "(t,eps)", "()"] {
            assert_eq!(Symbol::parse(s).to_string(), s);
        }
        let l = StateLabel::unit().concat(&StateLabel::atom("2"));
        assert_eq!(l.to_string(), "2");
    }
}
