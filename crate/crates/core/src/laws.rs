//! Executable statements of the algebraic laws, checked exactly.
//!
//! Each check returns `Ok(true)` when the law holds for the given operands.
//! Composites here are associative on the nose (row-major state and symbol
//! order with flat tuples), so most laws compare with [`automata_identical`];
//! the power/parallel law needs an explicit symbol reindexing.
//!
//! [`random_weighted`] and friends generate small rational automata for the
//! randomized suites.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{automata_equal, automata_identical, parallel, parallel_markov, series_markov, series_weighted, standard_constant, ConstantKind};
use crate::alphabet::{Alphabet, StateLabel};
use crate::automaton::{MarkovAutomaton, WeightedAutomaton};
use crate::error::Result;
use crate::scalar::{ratio, Rational};

type W = WeightedAutomaton<Rational>;
type M = MarkovAutomaton<Rational>;

// Concrete-typed wrappers so `MarkovAutomaton` operands deref-coerce.
fn same(a: &W, b: &W) -> bool {
    automata_identical(a, b)
}

fn par(a: &W, b: &W) -> W {
    parallel(a, b)
}

fn ser(a: &W, b: &W) -> Result<W> {
    series_weighted(a, b)
}

fn norm(w: &W) -> Result<W> {
    Ok(w.normalize()?.into_weighted())
}

/// Interfaces this large are never materialized by the checks.
const POWER_LIMIT: usize = 1 << 12;

/// `N(N(w)) = N(w)`.
pub fn normalize_idempotent(w: &W) -> Result<bool> {
    let once = w.normalize()?;
    Ok(same(&norm(&once)?, &once))
}

/// Scaling each state's outgoing weights by a positive factor does not
/// change the normalization.
pub fn row_scaling_invariant(w: &W, factors: &[Rational]) -> Result<bool> {
    Ok(same(&norm(&w.scale_rows(factors)?)?, &norm(w)?))
}

/// The total matrix of the `k`-step power is the `k`-th power of the total matrix.
pub fn total_of_power(w: &W, k: usize) -> Result<bool> {
    Ok(w.power(k, POWER_LIMIT)?.total_matrix() == w.total_matrix().pow(k as u64)?)
}

/// For Markov `m`, the `k`-step path weights out of every state sum to one.
pub fn paths_sum_to_one(m: &M, k: usize) -> Result<bool> {
    let sums = m.power(k, POWER_LIMIT)?.total_matrix().row_sums();
    Ok(sums.iter().all(One::is_one))
}

/// `N(Q x R) = N(Q) x N(R)`.
pub fn parallel_commutes_with_normalize(q: &W, r: &W) -> Result<bool> {
    let lhs = par(q, r).normalize()?;
    let rhs = par(&norm(q)?, &norm(r)?);
    Ok(same(&lhs, &rhs))
}

/// `(Q o R) o S = Q o (R o S)`.
pub fn series_weighted_associative(q: &W, r: &W, s: &W) -> Result<bool> {
    let lhs = ser(&ser(q, r)?, s)?;
    let rhs = ser(q, &ser(r, s)?)?;
    Ok(same(&lhs, &rhs))
}

/// `N(N(Q) o N(R)) = N(Q o R)`.
pub fn series_normalize_absorbs(q: &W, r: &W) -> Result<bool> {
    let lhs = ser(&norm(q)?, &norm(r)?)?.normalize()?;
    let rhs = ser(q, r)?.normalize()?;
    Ok(same(&lhs, &rhs))
}

/// `(Q . R) . S = Q . (R . S)`.
pub fn series_markov_associative(q: &M, r: &M, s: &M) -> Result<bool> {
    let lhs = series_markov(&series_markov(q, r)?, s)?;
    let rhs = series_markov(q, &series_markov(r, s)?)?;
    Ok(same(&lhs, &rhs))
}

/// Index of `(a_1 .. a_k, c_1 .. c_k)` in `A^k x C^k` for the symbol of
/// `(A x C)^k` with index `i`.
fn interleaved_to_blocked(i: usize, na: usize, nc: usize, k: usize) -> usize {
    let (mut a_idx, mut c_idx) = (0, 0);
    let mut rest = i;
    let mut digits = Vec::with_capacity(k);
    for _ in 0..k {
        digits.push(rest % (na * nc));
        rest /= na * nc;
    }
    for d in digits.into_iter().rev() {
        a_idx = a_idx * na + d / nc;
        c_idx = c_idx * nc + d % nc;
    }
    a_idx * nc.pow(k as u32) + c_idx
}

/// `(Q x R)^k = Q^k x R^k` up to regrouping the letters of each word pair.
pub fn power_distributes_over_parallel(q: &M, r: &M, k: usize) -> Result<bool> {
    let lhs = parallel_markov(q, r).power(k, POWER_LIMIT)?;
    let rhs = parallel_markov(&q.power(k, POWER_LIMIT)?, &r.power(k, POWER_LIMIT)?);
    let states: Vec<usize> = (0..lhs.num_states()).collect();
    let map = |x: &Alphabet, y: &Alphabet, total: usize| {
        (0..total)
            .map(|i| interleaved_to_blocked(i, x.len(), y.len(), k))
            .collect::<Vec<_>>()
    };
    let left = map(q.left(), r.left(), lhs.left().len());
    let right = map(q.right(), r.right(), lhs.right().len());
    automata_equal(&lhs, &rhs, &states, &left, &right)
}

/// `(Q . R)^k` against `Q^k . R^k`; in general these differ.
pub fn power_distributes_over_series(q: &M, r: &M, k: usize) -> Result<bool> {
    let lhs = series_markov(q, r)?.power(k, POWER_LIMIT)?;
    let rhs = series_markov(&q.power(k, POWER_LIMIT)?, &r.power(k, POWER_LIMIT)?)?;
    Ok(same(&lhs, &rhs))
}

/// `1_A . Q = Q = Q . 1_B`.
pub fn unit_laws(q: &M) -> Result<bool> {
    let left = series_markov(&standard_constant(ConstantKind::Identity, q.left(), None)?, q)?;
    let right = series_markov(q, &standard_constant(ConstantKind::Identity, q.right(), None)?)?;
    Ok(same(&left, q) && same(&right, q))
}

/// `(copy x 1) . (1 x merge) = merge . copy` over `a`.
pub fn frobenius(a: &Alphabet) -> Result<bool> {
    let c = |kind| standard_constant::<Rational>(kind, a, None);
    let id = c(ConstantKind::Identity)?;
    let lhs = series_markov(
        &parallel_markov(&c(ConstantKind::Copy)?, &id),
        &parallel_markov(&id, &c(ConstantKind::Merge)?),
    )?;
    let rhs = series_markov(&c(ConstantKind::Merge)?, &c(ConstantKind::Copy)?)?;
    // only the symbol lists matter; the composite names differ
    let states = [0];
    let left: Vec<usize> = (0..lhs.left().len()).collect();
    let right: Vec<usize> = (0..lhs.right().len()).collect();
    Ok(lhs.left().same_symbols(rhs.left())
        && lhs.right().same_symbols(rhs.right())
        && automata_equal(&lhs, &rhs, &states, &left, &right)?)
}

fn eps_rows_positive(w: &W) -> bool {
    let (a, b) = (w.left().epsilon_index(), w.right().epsilon_index());
    w.matrix(a, b)
        .is_some_and(|m| m.row_sums().iter().all(|s| *s > Rational::zero()))
}

/// Positive null-label row sums survive weighted series composition.
pub fn eps_positivity_preserved(q: &W, r: &W) -> Result<bool> {
    if !(eps_rows_positive(q) && eps_rows_positive(r)) {
        return Ok(true);
    }
    Ok(eps_rows_positive(&ser(q, r)?))
}

/// Outcome of one law on one set of operands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawOutcome {
    pub law: &'static str,
    pub operands: String,
    pub holds: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

fn outcome(law: &'static str, operands: String, r: Result<bool>) -> LawOutcome {
    match r {
        Ok(holds) => LawOutcome {
            law,
            operands,
            holds,
            error: None,
        },
        Err(e) => LawOutcome {
            law,
            operands,
            holds: false,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every applicable law on named Markov automata: single-operand laws
/// on each, two- and three-operand laws on each interface-compatible
/// combination, and Frobenius on every alphabet in use. Powers are taken
/// only when the interfaces stay small.
pub fn check_all(automata: &[(String, M)]) -> Vec<LawOutcome> {
    let mut out = Vec::new();
    let small = |m: &M, k: usize| m.left().len().pow(k as u32) <= 64 && m.right().len().pow(k as u32) <= 64;
    let mut alphabets: Vec<Alphabet> = Vec::new();
    for (name, m) in automata {
        out.push(outcome("normalize-idempotent", name.clone(), normalize_idempotent(m)));
        let factors: Vec<Rational> = (0..m.num_states()).map(|i| ratio(i as i64 + 2, 1)).collect();
        out.push(outcome("row-scaling", name.clone(), row_scaling_invariant(m, &factors)));
        out.push(outcome("unit-laws", name.clone(), unit_laws(m)));
        for k in 0..=3 {
            if small(m, k) {
                out.push(outcome("total-of-power", format!("{name}, k={k}"), total_of_power(m, k)));
                out.push(outcome("paths-sum-to-one", format!("{name}, k={k}"), paths_sum_to_one(m, k)));
            }
        }
        for a in [m.left(), m.right()] {
            if !alphabets.iter().any(|b| b.same_symbols(a)) {
                alphabets.push(a.clone());
            }
        }
    }
    for (qn, q) in automata {
        for (rn, r) in automata {
            let pair = format!("{qn}, {rn}");
            out.push(outcome("parallel-normalize", pair.clone(), parallel_commutes_with_normalize(q, r)));
            if q.num_states() * r.num_states() <= 64 {
                for k in 1..=2 {
                    if small(q, k) && small(r, k) && small(q, 2 * k) && small(r, 2 * k) {
                        out.push(outcome(
                            "power-parallel",
                            format!("{pair}, k={k}"),
                            power_distributes_over_parallel(q, r, k),
                        ));
                    }
                }
            }
            if !q.right().same_symbols(r.left()) {
                continue;
            }
            out.push(outcome("series-normalize", pair.clone(), series_normalize_absorbs(q, r)));
            out.push(outcome("eps-positivity", pair.clone(), eps_positivity_preserved(q, r)));
            for (sn, s) in automata {
                if r.right().same_symbols(s.left()) && q.num_states() * r.num_states() * s.num_states() <= 512 {
                    let triple = format!("{qn}, {rn}, {sn}");
                    out.push(outcome("series-weighted-associative", triple.clone(), series_weighted_associative(q, r, s)));
                    out.push(outcome("series-markov-associative", triple, series_markov_associative(q, r, s)));
                }
            }
        }
    }
    for a in alphabets.iter().filter(|a| a.len() <= 4) {
        out.push(outcome("frobenius", a.describe(), frobenius(a)));
    }
    out
}

/// Shape limits for [`random_weighted`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_symbols: usize,
    /// Largest numerator and denominator of a weight.
    pub max_weight: i64,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_states: 3,
            max_symbols: 3,
            max_weight: 5,
        }
    }
}

/// Alphabet `{eps, name0, name1, ...}` of `size` symbols.
pub fn random_alphabet<G: Rng>(rng: &mut G, name: &str, shape: RandomShape) -> Alphabet {
    let size = rng.gen_range(1..=shape.max_symbols);
    Alphabet::atomic(name, (1..size).map(|i| format!("{}{i}", name.to_lowercase()))).expect("distinct symbols")
}

/// Random weighted automaton `left -> right` with nonnegative rational
/// weights and a strictly positive null-label diagonal, so every row of the
/// null-label matrix is positive.
pub fn random_weighted<G: Rng>(rng: &mut G, left: &Alphabet, right: &Alphabet, shape: RandomShape) -> W {
    let n = rng.gen_range(1..=shape.max_states);
    let states = (1..=n).map(|i| StateLabel::atom(i.to_string())).collect();
    let (le, re) = (left.epsilon_index(), right.epsilon_index());
    let weight = |rng: &mut G| ratio(rng.gen_range(1..=shape.max_weight), rng.gen_range(1..=shape.max_weight));
    let mut transitions = Vec::new();
    for q in 0..n {
        transitions.push((le, re, q, q, weight(rng)));
        for a in 0..left.len() {
            for b in 0..right.len() {
                for q2 in 0..n {
                    if rng.gen_bool(0.3) && !(a == le && b == re && q == q2) {
                        transitions.push((a, b, q, q2, weight(rng)));
                    }
                }
            }
        }
    }
    WeightedAutomaton::from_transitions(left.clone(), right.clone(), states, transitions).expect("well-formed")
}

pub fn random_markov<G: Rng>(rng: &mut G, left: &Alphabet, right: &Alphabet, shape: RandomShape) -> M {
    random_weighted(rng, left, right, shape).normalize().expect("positive rows")
}


/// Pass count of one law over a randomized batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawTally {
    pub law: &'static str,
    pub cases: usize,
    pub passed: usize,
}

impl LawTally {
    pub fn all_passed(&self) -> bool {
        self.passed == self.cases
    }
}

/// Every law on `cases` random operand sets drawn from a ChaCha8 stream
/// seeded with `seed`. Powers use at most two symbols per interface.
pub fn randomized_suite(cases: usize, seed: u64) -> Vec<LawTally> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shape = RandomShape::default();
    let narrow = RandomShape {
        max_symbols: 2,
        max_states: 2,
        ..shape
    };
    let mut tallies: Vec<LawTally> = Vec::new();
    let mut record = |law: &'static str, r: Result<bool>| {
        let ok = matches!(r, Ok(true));
        match tallies.iter_mut().find(|t| t.law == law) {
            Some(t) => {
                t.cases += 1;
                t.passed += ok as usize;
            }
            None => tallies.push(LawTally {
                law,
                cases: 1,
                passed: ok as usize,
            }),
        }
    };
    for case in 0..cases {
        let [a, b, c, d] = ["A", "B", "C", "D"].map(|n| random_alphabet(&mut rng, n, shape));
        let q = random_weighted(&mut rng, &a, &b, shape);
        let r = random_weighted(&mut rng, &b, &c, shape);
        let s = random_weighted(&mut rng, &c, &d, shape);
        let factors: Vec<Rational> = (0..q.num_states())
            .map(|_| ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)))
            .collect();
        record("normalize-idempotent", normalize_idempotent(&q));
        record("row-scaling", row_scaling_invariant(&q, &factors));
        record("total-of-power", total_of_power(&q, case % 5));
        record("parallel-normalize", parallel_commutes_with_normalize(&q, &s));
        record("series-weighted-associative", series_weighted_associative(&q, &r, &s));
        record("series-normalize", series_normalize_absorbs(&q, &r));
        record("eps-positivity", eps_positivity_preserved(&q, &r));

        let (qm, rm, sm) = (q.normalize(), r.normalize(), s.normalize());
        if let (Ok(qm), Ok(rm), Ok(sm)) = (qm, rm, sm) {
            record("series-markov-associative", series_markov_associative(&qm, &rm, &sm));
            record("unit-laws", unit_laws(&qm));
        }

        let [na, nb, nc, nd] = ["A", "B", "C", "D"].map(|n| random_alphabet(&mut rng, n, narrow));
        let x = random_markov(&mut rng, &na, &nb, narrow);
        let y = random_markov(&mut rng, &nc, &nd, narrow);
        record("paths-sum-to-one", paths_sum_to_one(&x, case % 6));
        record("power-parallel", power_distributes_over_parallel(&x, &y, 1 + case % 3));
    }
    for size in [2, 3] {
        let a = Alphabet::atomic("A", (1..size).map(|i| format!("a{i}"))).expect("distinct symbols");
        record("frobenius", frobenius(&a));
    }
    tallies
}
