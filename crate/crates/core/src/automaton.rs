//! Weighted and Markov automata with a left and a right interface.
//!
//! An automaton is a state set plus a family of nonnegative square matrices
//! indexed by `(left symbol, right symbol)`. Absent label pairs denote zero
//! matrices. The total matrix is the entrywise sum of the family; an
//! automaton is Markov when every row of the total matrix sums to one.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, StateLabel, Symbol};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `(left symbol index, right symbol index)`.
pub type LabelPair = (usize, usize);

/// A problem found by [`WeightedAutomaton::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NegativeEntry {
        left: Symbol,
        right: Symbol,
        from: StateLabel,
        to: StateLabel,
        value: String,
    },
    ZeroEpsilonRowSum {
        state: StateLabel,
    },
    DimensionMismatch {
        left: Symbol,
        right: Symbol,
        shape: (usize, usize),
        states: usize,
    },
    LabelOutOfRange {
        pair: LabelPair,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry {
                left,
                right,
                from,
                to,
                value,
            } => write!(
                f,
                "negative entry {value} in ({left}|{right}) matrix at [{from}, {to}]"
            ),
            Violation::ZeroEpsilonRowSum { state } => {
                write!(f, "zero eps-row-sum at state {state}")
            }
            Violation::DimensionMismatch {
                left,
                right,
                shape,
                states,
            } => write!(
                f,
                "({left}|{right}) matrix is {}x{} but automaton has {states} states",
                shape.0, shape.1
            ),
            Violation::LabelOutOfRange { pair } => {
                write!(f, "label pair {pair:?} outside the interface alphabets")
            }
        }
    }
}

/// Outcome of [`WeightedAutomaton::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidAutomaton(self.violations))
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct WeightedAutomaton<S> {
    left: Alphabet,
    right: Alphabet,
    states: Vec<StateLabel>,
    family: BTreeMap<LabelPair, Matrix<S>>,
}

impl<S: Scalar> WeightedAutomaton<S> {
    /// Builds an automaton, rejecting matrices of the wrong size or label
    /// pairs outside the alphabets. Zero matrices are dropped. Weights are not
    /// checked here; see [`validate`](Self::validate).
    pub fn new(
        left: Alphabet,
        right: Alphabet,
        states: Vec<StateLabel>,
        family: BTreeMap<LabelPair, Matrix<S>>,
    ) -> Result<Self> {
        let n = states.len();
        let mut violations = Vec::new();
        for (&(a, b), m) in &family {
            if a >= left.len() || b >= right.len() {
                violations.push(Violation::LabelOutOfRange { pair: (a, b) });
            } else if m.shape() != (n, n) {
                violations.push(Violation::DimensionMismatch {
                    left: left.symbol(a).clone(),
                    right: right.symbol(b).clone(),
                    shape: m.shape(),
                    states: n,
                });
            }
        }
        if !violations.is_empty() {
            return Err(Error::InvalidAutomaton(violations));
        }
        let family = family.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(Self {
            left,
            right,
            states,
            family,
        })
    }

    /// Builds an automaton from `(left, right, from, to, weight)` index tuples;
    /// repeated tuples are summed.
    pub fn from_transitions<I>(
        left: Alphabet,
        right: Alphabet,
        states: Vec<StateLabel>,
        transitions: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, usize, S)>,
    {
        let n = states.len();
        let mut triplets: BTreeMap<LabelPair, Vec<(usize, usize, S)>> = BTreeMap::new();
        for (a, b, q, q2, w) in transitions {
            if a >= left.len() || b >= right.len() {
                return Err(Error::InvalidAutomaton(vec![Violation::LabelOutOfRange {
                    pair: (a, b),
                }]));
            }
            triplets.entry((a, b)).or_default().push((q, q2, w));
        }
        let family = triplets
            .into_iter()
            .map(|(k, t)| Matrix::from_triplets(n, n, t).map(|m| (k, m)))
            .collect::<Result<_>>()?;
        Self::new(left, right, states, family)
    }

    pub(crate) fn from_parts_unchecked(
        left: Alphabet,
        right: Alphabet,
        states: Vec<StateLabel>,
        family: BTreeMap<LabelPair, Matrix<S>>,
    ) -> Self {
        Self {
            left,
            right,
            states,
            family,
        }
    }

    pub fn left(&self) -> &Alphabet {
        &self.left
    }

    pub fn right(&self) -> &Alphabet {
        &self.right
    }

    pub fn states(&self) -> &[StateLabel] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &StateLabel) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// Nonzero label-pair matrices in label order.
    pub fn family(&self) -> impl Iterator<Item = (LabelPair, &Matrix<S>)> {
        self.family.iter().map(|(k, m)| (*k, m))
    }

    pub fn matrix(&self, a: usize, b: usize) -> Option<&Matrix<S>> {
        self.family.get(&(a, b))
    }

    /// Matrix for a label pair by symbol; zero if absent.
    pub fn matrix_for(&self, a: &Symbol, b: &Symbol) -> Result<Matrix<S>> {
        let ai = self.left.require_index(a)?;
        let bi = self.right.require_index(b)?;
        Ok(self
            .matrix(ai, bi)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.num_states(), self.num_states())))
    }

    pub fn entry(&self, a: usize, b: usize, q: usize, q2: usize) -> S {
        self.matrix(a, b).map_or_else(S::zero, |m| m.get(q, q2))
    }

    /// Returns a copy with one entry replaced.
    pub fn with_entry(&self, a: usize, b: usize, q: usize, q2: usize, value: S) -> Result<Self> {
        let n = self.num_states();
        let mut family = self.family.clone();
        let current = family
            .remove(&(a, b))
            .unwrap_or_else(|| Matrix::zeros(n, n));
        if q >= n || q2 >= n {
            return Err(Error::StateOutOfRange {
                index: q.max(q2),
                count: n,
            });
        }
        let updated = current.map_indexed(|i, j, v| if (i, j) == (q, q2) { S::zero() } else { v.clone() });
        let updated = updated.add(&Matrix::from_triplets(n, n, [(q, q2, value)])?)?;
        family.insert((a, b), updated);
        Self::new(self.left.clone(), self.right.clone(), self.states.clone(), family)
    }

    /// Multiplies every outgoing weight of state `q` by `factors[q]`.
    pub fn scale_rows(&self, factors: &[S]) -> Result<Self> {
        if factors.len() != self.num_states() {
            return Err(Error::VectorLength {
                expected: self.num_states(),
                got: factors.len(),
            });
        }
        Ok(self.map_family(|m| m.map_indexed(|i, _, v| v.clone() * factors[i].clone())))
    }

    pub(crate) fn map_family(&self, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Self {
        let family = self
            .family
            .iter()
            .map(|(k, m)| (*k, f(m)))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        Self::from_parts_unchecked(self.left.clone(), self.right.clone(), self.states.clone(), family)
    }

    /// Entrywise sum of all label-pair matrices.
    pub fn total_matrix(&self) -> Matrix<S> {
        let n = self.num_states();
        let triplets = self
            .family
            .values()
            .flat_map(|m| m.iter().map(|(i, j, v)| (i, j, v.clone())));
        Matrix::from_triplets(n, n, triplets).expect("family matrices are n x n")
    }

    /// Checks nonnegativity, matrix shapes and strictly positive (eps, eps) row sums.
    pub fn validate(&self) -> ValidationReport {
        let n = self.num_states();
        let mut violations = Vec::new();
        for (&(a, b), m) in &self.family {
            if a >= self.left.len() || b >= self.right.len() {
                violations.push(Violation::LabelOutOfRange { pair: (a, b) });
                continue;
            }
            if m.shape() != (n, n) {
                violations.push(Violation::DimensionMismatch {
                    left: self.left.symbol(a).clone(),
                    right: self.right.symbol(b).clone(),
                    shape: m.shape(),
                    states: n,
                });
                continue;
            }
            for (i, j, v) in m.iter() {
                if v.is_negative() || v.to_f64().is_nan() {
                    violations.push(Violation::NegativeEntry {
                        left: self.left.symbol(a).clone(),
                        right: self.right.symbol(b).clone(),
                        from: self.states[i].clone(),
                        to: self.states[j].clone(),
                        value: v.to_canonical_string(),
                    });
                }
            }
        }
        let eps = (self.left.epsilon_index(), self.right.epsilon_index());
        let eps_sums = self
            .family
            .get(&eps)
            .filter(|m| m.shape() == (n, n))
            .map(Matrix::row_sums)
            .unwrap_or_else(|| vec![S::zero(); n]);
        for (q, sum) in eps_sums.iter().enumerate() {
            if !sum.is_positive() {
                violations.push(Violation::ZeroEpsilonRowSum {
                    state: self.states[q].clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    /// True iff every total-matrix row sums to one (within tolerance for floats).
    pub fn is_markov(&self) -> bool {
        self.first_non_stochastic_row().is_none()
    }

    fn first_non_stochastic_row(&self) -> Option<(usize, S)> {
        self.total_matrix()
            .row_sums()
            .into_iter()
            .enumerate()
            .find(|(_, s)| !s.approx_eq(&S::one()))
    }

    /// Divides every weight by its row's total-matrix row sum.
    pub fn normalize(&self) -> Result<MarkovAutomaton<S>> {
        let sums = self.total_matrix().row_sums();
        if let Some(q) = sums.iter().position(|s| !s.is_positive()) {
            return Err(Error::ZeroRowSum {
                state: self.states[q].to_string(),
            });
        }
        let normalized = self.map_family(|m| m.map_indexed(|i, _, v| v.clone() / sums[i].clone()));
        Ok(MarkovAutomaton(normalized))
    }

    fn word_indices(&self, u: &[Symbol], v: &[Symbol]) -> Result<Vec<LabelPair>> {
        if u.len() != v.len() {
            return Err(Error::WordLengthMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        u.iter()
            .zip(v)
            .map(|(a, b)| Ok((self.left.require_index(a)?, self.right.require_index(b)?)))
            .collect()
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.num_states() {
            Err(Error::StateOutOfRange {
                index: q,
                count: self.num_states(),
            })
        } else {
            Ok(())
        }
    }

    /// Entry `[q, q2]` of `Q_{a1,b1} ... Q_{ak,bk}`: the weight of all paths
    /// from `q` to `q2` with left word `u` and right word `v`. The empty
    /// product is the identity.
    pub fn path_probability(&self, u: &[Symbol], v: &[Symbol], q: usize, q2: usize) -> Result<S> {
        let labels = self.word_indices(u, v)?;
        self.check_state(q)?;
        self.check_state(q2)?;
        let mut x = vec![S::zero(); self.num_states()];
        x[q] = S::one();
        for pair in labels {
            match self.family.get(&pair) {
                Some(m) => x = m.vec_mul(&x)?,
                None => return Ok(S::zero()),
            }
        }
        Ok(x.swap_remove(q2))
    }

    /// Runs `x_i = x_{i-1} Q_{a_i, b_i}` and returns every intermediate vector.
    pub fn behaviour(&self, x0: Vec<S>, u: &[Symbol], v: &[Symbol]) -> Result<Behaviour<S>> {
        let labels = self.word_indices(u, v)?;
        if x0.len() != self.num_states() {
            return Err(Error::VectorLength {
                expected: self.num_states(),
                got: x0.len(),
            });
        }
        if let Some((i, x)) = x0.iter().enumerate().find(|(_, x)| x.is_negative()) {
            return Err(Error::NegativeVectorEntry {
                index: i,
                value: x.to_canonical_string(),
            });
        }
        let mut vectors = vec![x0];
        for pair in labels {
            let last = vectors.last().expect("non-empty");
            let next = match self.family.get(&pair) {
                Some(m) => m.vec_mul(last)?,
                None => vec![S::zero(); self.num_states()],
            };
            vectors.push(next);
        }
        Ok(Behaviour {
            left_word: u.to_vec(),
            right_word: v.to_vec(),
            vectors,
        })
    }

    /// Breadth-first order of states reachable from `q0` along positive
    /// total-matrix entries, `q0` first, neighbours by increasing index.
    pub fn reachable_states(&self, q0: usize) -> Result<Vec<usize>> {
        self.check_state(q0)?;
        let total = self.total_matrix();
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![q0];
        seen[q0] = true;
        let mut queue = VecDeque::from([q0]);
        while let Some(q) = queue.pop_front() {
            for (j, v) in total.row(q) {
                if v.is_positive() && !seen[*j] {
                    seen[*j] = true;
                    order.push(*j);
                    queue.push_back(*j);
                }
            }
        }
        Ok(order)
    }

    /// Sub-automaton on the states reachable from `q0`, with the map from new
    /// to old state indices.
    pub fn reach(&self, q0: usize) -> Result<(Self, Vec<usize>)> {
        let keep = self.reachable_states(q0)?;
        Ok((self.restrict(&keep), keep))
    }

    pub(crate) fn restrict(&self, keep: &[usize]) -> Self {
        let states = keep.iter().map(|&i| self.states[i].clone()).collect();
        let family = self
            .family
            .iter()
            .map(|(k, m)| (*k, m.select(keep, keep)))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        Self::from_parts_unchecked(self.left.clone(), self.right.clone(), states, family)
    }

    /// Materializes the automaton of `k`-step paths, with interfaces `A^k` and
    /// `B^k`. Fails when either interface would exceed `max_symbols`.
    pub fn power(&self, k: usize, max_symbols: usize) -> Result<Self> {
        for alphabet in [&self.left, &self.right] {
            let size = checked_pow(alphabet.len(), k);
            if size.is_none_or(|s| s > max_symbols) {
                return Err(Error::PowerTooLarge {
                    symbols: size.unwrap_or(usize::MAX),
                    limit: max_symbols,
                });
            }
        }
        let n = self.num_states();
        let mut family: BTreeMap<LabelPair, Matrix<S>> = BTreeMap::new();
        family.insert((0, 0), Matrix::identity(n));
        let (nl, nr) = (self.left.len(), self.right.len());
        for _ in 0..k {
            let mut next = BTreeMap::new();
            for (&(u, v), prefix) in &family {
                for (&(a, b), step) in &self.family {
                    let product = prefix.mul(step)?;
                    if !product.is_zero() {
                        next.insert((u * nl + a, v * nr + b), product);
                    }
                }
            }
            family = next;
        }
        Ok(Self::from_parts_unchecked(
            self.left.power(k),
            self.right.power(k),
            self.states.clone(),
            family,
        ))
    }

    /// Canonical JSON form with transitions sorted by index order.
    pub fn to_json(&self) -> AutomatonJson {
        let mut transitions = Vec::new();
        for (&(a, b), m) in &self.family {
            for (i, j, v) in m.iter() {
                transitions.push(TransitionJson(
                    self.left.symbol(a).to_string(),
                    self.right.symbol(b).to_string(),
                    self.states[i].to_string(),
                    self.states[j].to_string(),
                    v.to_canonical_string(),
                ));
            }
        }
        AutomatonJson {
            left: AlphabetJson::from(&self.left),
            right: AlphabetJson::from(&self.right),
            states: self.states.iter().map(StateLabel::to_string).collect(),
            transitions,
        }
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        let left = json.left.to_alphabet()?;
        let right = json.right.to_alphabet()?;
        let states: Vec<StateLabel> = json.states.iter().map(|s| StateLabel::parse(s)).collect();
        let lookup = |s: &str| {
            let label = StateLabel::parse(s);
            states
                .iter()
                .position(|x| *x == label)
                .ok_or_else(|| Error::UnknownState(s.to_string()))
        };
        let mut transitions = Vec::with_capacity(json.transitions.len());
        for TransitionJson(a, b, q, q2, w) in &json.transitions {
            let weight = S::parse_weight(w)
                .ok_or_else(|| Error::Invalid(format!("bad weight `{w}`")))?;
            transitions.push((
                left.require_index(&Symbol::parse(a))?,
                right.require_index(&Symbol::parse(b))?,
                lookup(q)?,
                lookup(q2)?,
                weight,
            ));
        }
        Self::from_transitions(left, right, states, transitions)
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

impl<S: Scalar> fmt::Debug for WeightedAutomaton<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedAutomaton")
            .field("left", &self.left.describe())
            .field("right", &self.right.describe())
            .field("states", &self.states.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .field("family", &self.family)
            .finish()
    }
}

/// A weighted automaton whose total matrix is row-stochastic.
#[derive(Clone, PartialEq)]
pub struct MarkovAutomaton<S>(WeightedAutomaton<S>);

impl<S: Scalar> MarkovAutomaton<S> {
    /// Accepts `w` if it validates and is Markov.
    pub fn new(w: WeightedAutomaton<S>) -> Result<Self> {
        w.validate().into_result()?;
        if let Some((q, sum)) = w.first_non_stochastic_row() {
            return Err(Error::NotMarkov {
                state: w.states[q].to_string(),
                sum: sum.to_canonical_string(),
            });
        }
        Ok(Self(w))
    }

    /// Wraps an automaton already known to be Markov by construction.
    pub(crate) fn assume(w: WeightedAutomaton<S>) -> Self {
        debug_assert!(w.is_markov());
        Self(w)
    }

    pub fn as_weighted(&self) -> &WeightedAutomaton<S> {
        &self.0
    }

    pub fn into_weighted(self) -> WeightedAutomaton<S> {
        self.0
    }

    /// Reachable sub-automaton; restriction to a forward-closed set keeps row sums.
    pub fn reach(&self, q0: usize) -> Result<(Self, Vec<usize>)> {
        let (w, map) = self.0.reach(q0)?;
        Ok((Self(w), map))
    }

    /// Power automaton; Markov because its total matrix is a power of a stochastic matrix.
    pub fn power(&self, k: usize, max_symbols: usize) -> Result<Self> {
        self.0.power(k, max_symbols).map(Self)
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        Self::new(WeightedAutomaton::from_json(json)?)
    }
}

impl<S> Deref for MarkovAutomaton<S> {
    type Target = WeightedAutomaton<S>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<S: Scalar> fmt::Debug for MarkovAutomaton<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Markov{:?}", self.0)
    }
}

/// A run of an automaton along a pair of words.
#[derive(Debug, Clone, PartialEq)]
pub struct Behaviour<S> {
    pub left_word: Vec<Symbol>,
    pub right_word: Vec<Symbol>,
    /// `x_0 .. x_k`; not necessarily distributions, and often zero.
    pub vectors: Vec<Vec<S>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetJson {
    pub name: String,
    pub symbols: Vec<String>,
    pub eps: String,
}

impl From<&Alphabet> for AlphabetJson {
    fn from(a: &Alphabet) -> Self {
        Self {
            name: a.name().to_string(),
            symbols: a.symbols().iter().map(Symbol::to_string).collect(),
            eps: a.epsilon().to_string(),
        }
    }
}

impl AlphabetJson {
    pub fn to_alphabet(&self) -> Result<Alphabet> {
        let symbols: Vec<Symbol> = self.symbols.iter().map(|s| Symbol::parse(s)).collect();
        let eps = Symbol::parse(&self.eps);
        let idx = symbols
            .iter()
            .position(|s| *s == eps)
            .ok_or_else(|| Error::Invalid(format!("alphabet {} lacks its null symbol", self.name)))?;
        Alphabet::new(self.name.clone(), symbols, idx)
    }
}

/// `[left, right, from, to, weight]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson(pub String, pub String, pub String, pub String, pub String);

/// Canonical serialized automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub left: AlphabetJson,
    pub right: AlphabetJson,
    pub states: Vec<String>,
    pub transitions: Vec<TransitionJson>,
}
