//! Operations and constants of the automaton algebra.
//!
//! * [`parallel`]: independent simultaneous steps, Kronecker product of every
//!   pair of label matrices.
//! * [`series_weighted`]: synchronization on the shared middle interface,
//!   summing over the shared symbol.
//! * [`series_markov`]: the weighted series composite followed by normalization.
//! * [`relation_automaton`] and [`standard_constant`]: one-state automata
//!   with uniform weight `1/|rho|` on the related pairs.
//!
//! Composite states are ordered row-major (left operand slow), so both
//! composites are associative on the nose, states and symbols included.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::alphabet::{Alphabet, StateLabel, Symbol};
use crate::automaton::{LabelPair, MarkovAutomaton, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

fn product_states(q: &[StateLabel], r: &[StateLabel]) -> Vec<StateLabel> {
    q.iter()
        .flat_map(|a| r.iter().map(move |b| a.concat(b)))
        .collect()
}

/// Parallel composite `Q x R`: states `Q x R`, interfaces `A x C` and `B x D`,
/// and `(Q x R)_{(a,c),(b,d)} = Q_{a,b} (x) R_{c,d}`.
pub fn parallel<S: Scalar>(q: &WeightedAutomaton<S>, r: &WeightedAutomaton<S>) -> WeightedAutomaton<S> {
    let left = q.left().product(r.left());
    let right = q.right().product(r.right());
    let (nc, nd) = (r.left().len(), r.right().len());
    let mut family = BTreeMap::new();
    for ((a, b), qm) in q.family() {
        for ((c, d), rm) in r.family() {
            family.insert((a * nc + c, b * nd + d), qm.kron(rm));
        }
    }
    WeightedAutomaton::from_parts_unchecked(
        left,
        right,
        product_states(q.states(), r.states()),
        family,
    )
}

/// Parallel composite of Markov automata, which is again Markov.
pub fn parallel_markov<S: Scalar>(q: &MarkovAutomaton<S>, r: &MarkovAutomaton<S>) -> MarkovAutomaton<S> {
    MarkovAutomaton::assume(parallel(q, r))
}

fn check_interface(left: &Alphabet, right: &Alphabet) -> Result<()> {
    if left.same_symbols(right) {
        Ok(())
    } else {
        Err(Error::InterfaceMismatch {
            left: left.describe(),
            right: right.describe(),
        })
    }
}

/// Weighted series composite `Q o R` for `Q: A -> B`, `R: B -> C`:
/// `(Q o R)_{a,c} = sum_b Q_{a,b} (x) R_{b,c}`.
pub fn series_weighted<S: Scalar>(
    q: &WeightedAutomaton<S>,
    r: &WeightedAutomaton<S>,
) -> Result<WeightedAutomaton<S>> {
    check_interface(q.right(), r.left())?;
    let n = q.num_states() * r.num_states();
    let mut by_middle: BTreeMap<usize, Vec<(usize, &Matrix<S>)>> = BTreeMap::new();
    for ((b, c), m) in r.family() {
        by_middle.entry(b).or_default().push((c, m));
    }
    let mut family: BTreeMap<LabelPair, Matrix<S>> = BTreeMap::new();
    for ((a, b), qm) in q.family() {
        let Some(partners) = by_middle.get(&b) else {
            continue;
        };
        for (c, rm) in partners {
            let term = qm.kron(rm);
            match family.remove(&(a, *c)) {
                Some(acc) => family.insert((a, *c), acc.add(&term)?),
                None => family.insert((a, *c), term),
            };
        }
    }
    family.retain(|_, m| !m.is_zero());
    debug_assert!(family.values().all(|m| m.shape() == (n, n)));
    Ok(WeightedAutomaton::from_parts_unchecked(
        q.left().clone(),
        r.right().clone(),
        product_states(q.states(), r.states()),
        family,
    ))
}

/// Series composite of Markov automata: `Q . R = N(Q o R)`.
pub fn series_markov<S: Scalar>(q: &MarkovAutomaton<S>, r: &MarkovAutomaton<S>) -> Result<MarkovAutomaton<S>> {
    series_weighted(q, r)?.normalize()
}

/// A relation between two alphabets that relates their null symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    left: Alphabet,
    right: Alphabet,
    pairs: BTreeSet<LabelPair>,
}

impl Relation {
    pub fn new<I>(left: Alphabet, right: Alphabet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Symbol, Symbol)>,
    {
        let mut indexed = BTreeSet::new();
        for (a, b) in pairs {
            let ai = left.index_of(&a).ok_or_else(|| {
                Error::InvalidRelation(format!("{a} is not in {}", left.describe()))
            })?;
            let bi = right.index_of(&b).ok_or_else(|| {
                Error::InvalidRelation(format!("{b} is not in {}", right.describe()))
            })?;
            indexed.insert((ai, bi));
        }
        Self::from_indices(left, right, indexed)
    }

    pub fn from_indices(left: Alphabet, right: Alphabet, pairs: BTreeSet<LabelPair>) -> Result<Self> {
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= left.len() || *b >= right.len()) {
            return Err(Error::InvalidRelation(format!("pair ({a}, {b}) out of range")));
        }
        if !pairs.contains(&(left.epsilon_index(), right.epsilon_index())) {
            return Err(Error::InvalidRelation(format!(
                "({}, {}) must be related",
                left.epsilon(),
                right.epsilon()
            )));
        }
        Ok(Self { left, right, pairs })
    }

    /// Graph of a function `f: left -> right`.
    pub fn graph(left: Alphabet, right: Alphabet, f: impl Fn(&Symbol) -> Symbol) -> Result<Self> {
        let pairs: Vec<(Symbol, Symbol)> = left.symbols().iter().map(|s| (s.clone(), f(s))).collect();
        Self::new(left, right, pairs)
    }

    pub fn converse(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    pub fn left(&self) -> &Alphabet {
        &self.left
    }

    pub fn right(&self) -> &Alphabet {
        &self.right
    }

    pub fn pairs(&self) -> &BTreeSet<LabelPair> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// One-state automaton with weight `1/|rel|` on every related pair.
pub fn relation_automaton<S: Scalar>(rel: &Relation) -> MarkovAutomaton<S> {
    let weight = S::one() / S::from_ratio(rel.len() as i64, 1);
    let family = rel
        .pairs
        .iter()
        .map(|&k| (k, Matrix::identity(1).map(|_| weight.clone())))
        .collect();
    MarkovAutomaton::assume(WeightedAutomaton::from_parts_unchecked(
        rel.left.clone(),
        rel.right.clone(),
        vec![StateLabel::unit()],
        family,
    ))
}

/// The named relation constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    /// `1_A`, the identity on `A`.
    Identity,
    /// `Delta_A : A -> A x A`.
    Copy,
    /// `Nabla_A : A x A -> A`, the converse of copy.
    Merge,
    /// `twist_{A,B} : A x B -> B x A`.
    Swap,
    /// `eta_A : I -> A x A`, relating `*` with every `(a, a)`.
    Unit,
    /// `epsilon_A : A x A -> I`, the converse of unit.
    Counit,
}

impl ConstantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstantKind::Identity => "id",
            ConstantKind::Copy => "copy",
            ConstantKind::Merge => "merge",
            ConstantKind::Swap => "swap",
            ConstantKind::Unit => "unit",
            ConstantKind::Counit => "counit",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "id" => ConstantKind::Identity,
            "copy" => ConstantKind::Copy,
            "merge" => ConstantKind::Merge,
            "swap" => ConstantKind::Swap,
            "unit" => ConstantKind::Unit,
            "counit" => ConstantKind::Counit,
            _ => return None,
        })
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The relation underlying a named constant.
pub fn constant_relation(kind: ConstantKind, a: &Alphabet, b: Option<&Alphabet>) -> Result<Relation> {
    let diagonal = |s: &Symbol| Symbol::tuple(&[s.clone(), s.clone()]);
    let aa = || a.product(a);
    match kind {
        ConstantKind::Identity => Relation::graph(a.clone(), a.clone(), Symbol::clone),
        ConstantKind::Copy => Relation::graph(a.clone(), aa(), diagonal),
        ConstantKind::Merge => Ok(Relation::graph(a.clone(), aa(), diagonal)?.converse()),
        ConstantKind::Swap => {
            let b = b.ok_or(Error::MissingAlphabet("swap"))?;
            let pairs = a.symbols().iter().flat_map(|x| {
                b.symbols().iter().map(move |y| {
                    (Symbol::tuple(&[x.clone(), y.clone()]), Symbol::tuple(&[y.clone(), x.clone()]))
                })
            });
            Relation::new(a.product(b), b.product(a), pairs.collect::<Vec<_>>())
        }
        ConstantKind::Unit => {
            let star = Alphabet::trivial();
            let eps = star.epsilon().clone();
            let pairs: Vec<_> = a.symbols().iter().map(|s| (eps.clone(), diagonal(s))).collect();
            Relation::new(star, aa(), pairs)
        }
        ConstantKind::Counit => Ok(constant_relation(ConstantKind::Unit, a, None)?.converse()),
    }
}

/// Builds one of the named relation constants over `a` (and `b` for swap).
pub fn standard_constant<S: Scalar>(
    kind: ConstantKind,
    a: &Alphabet,
    b: Option<&Alphabet>,
) -> Result<MarkovAutomaton<S>> {
    constant_relation(kind, a, b).map(|rel| relation_automaton(&rel))
}

fn check_permutation(map: &[usize], n: usize, what: &str) -> Result<()> {
    if map.len() != n {
        return Err(Error::NonBijective(format!(
            "{what} map has {} entries for {n} elements",
            map.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in map {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::NonBijective(format!("{what} map is not a permutation")));
        }
    }
    Ok(())
}

/// Exact comparison of `q` and `r` under reindexing: state `i` of `q`
/// corresponds to `states[i]` of `r`, and likewise for symbols. Automata of
/// different sizes are simply unequal.
pub fn automata_equal<S: Scalar>(
    q: &WeightedAutomaton<S>,
    r: &WeightedAutomaton<S>,
    states: &[usize],
    left: &[usize],
    right: &[usize],
) -> Result<bool> {
    if q.num_states() != r.num_states() || q.left().len() != r.left().len() || q.right().len() != r.right().len() {
        return Ok(false);
    }
    check_permutation(states, q.num_states(), "state")?;
    check_permutation(left, q.left().len(), "left symbol")?;
    check_permutation(right, q.right().len(), "right symbol")?;
    if left[q.left().epsilon_index()] != r.left().epsilon_index()
        || right[q.right().epsilon_index()] != r.right().epsilon_index()
    {
        return Ok(false);
    }
    let q_nnz: usize = q.family().map(|(_, m)| m.nnz()).sum();
    let r_nnz: usize = r.family().map(|(_, m)| m.nnz()).sum();
    if q_nnz != r_nnz {
        return Ok(false);
    }
    for ((a, b), qm) in q.family() {
        let Some(rm) = r.matrix(left[a], right[b]) else {
            return Ok(false);
        };
        for (i, j, v) in qm.iter() {
            if rm.get(states[i], states[j]) != *v {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact equality with identical state and symbol indexing.
pub fn automata_identical<S: Scalar>(q: &WeightedAutomaton<S>, r: &WeightedAutomaton<S>) -> bool {
    let id = |n: usize| (0..n).collect::<Vec<_>>();
    automata_equal(q, r, &id(q.num_states()), &id(q.left().len()), &id(q.right().len())).unwrap_or(false)
}
