//! Deadlock analysis of closed Markov automata.
//!
//! A closed automaton has singleton interfaces, so it is just a Markov chain.
//! A deadlock is a state whose only positive transition is its self-loop.
//! With deadlocks ordered last the total matrix has the block form
//! `[[S, T], [0, I]]`; absorption probabilities solve `(I - S) X = T`.

use std::collections::VecDeque;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::StateLabel;
use crate::automaton::{MarkovAutomaton, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

fn require_closed<S: Scalar>(m: &WeightedAutomaton<S>) -> Result<()> {
    if m.left().is_singleton() && m.right().is_singleton() {
        Ok(())
    } else {
        Err(Error::ClosedSystemRequired {
            left: m.left().len(),
            right: m.right().len(),
        })
    }
}

fn deadlocks_of<S: Scalar>(total: &Matrix<S>) -> Vec<usize> {
    (0..total.rows())
        .filter(|&q| {
            let mut positive = total.row(q).iter().filter(|(_, v)| v.is_positive());
            matches!((positive.next(), positive.next()), (Some((j, _)), None) if *j == q)
        })
        .collect()
}

/// States whose only positive transition is a self-loop.
pub fn find_deadlocks<S: Scalar>(m: &MarkovAutomaton<S>) -> Result<Vec<usize>> {
    require_closed(m)?;
    Ok(deadlocks_of(&m.total_matrix()))
}

/// Total matrix reordered as `[[S, T], [0, I]]` with deadlocks last.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingDecomposition<S> {
    /// Original indices of transient states, in original order.
    pub transient_states: Vec<usize>,
    /// Original indices of deadlock states, in original order.
    pub deadlock_states: Vec<usize>,
    pub s_block: Matrix<S>,
    pub t_block: Matrix<S>,
    /// `permutation[original] = reordered position`.
    pub permutation: Vec<usize>,
}

impl<S: Scalar> AbsorbingDecomposition<S> {
    /// Reordered position to original index.
    pub fn order(&self) -> Vec<usize> {
        self.transient_states
            .iter()
            .chain(&self.deadlock_states)
            .copied()
            .collect()
    }

    /// Reassembles `[[S, T], [0, I]]`.
    pub fn block_matrix(&self) -> Matrix<S> {
        let t = self.transient_states.len();
        let n = t + self.deadlock_states.len();
        let s = self.s_block.iter().map(|(i, j, v)| (i, j, v.clone()));
        let tb = self.t_block.iter().map(|(i, j, v)| (i, t + j, v.clone()));
        let id = (t..n).map(|i| (i, i, S::one()));
        Matrix::from_triplets(n, n, s.chain(tb).chain(id)).expect("indices in range")
    }
}

pub fn absorbing_decomposition<S: Scalar>(m: &MarkovAutomaton<S>) -> Result<AbsorbingDecomposition<S>> {
    require_closed(m)?;
    decompose(&m.total_matrix())
}

fn decompose<S: Scalar>(total: &Matrix<S>) -> Result<AbsorbingDecomposition<S>> {
    let deadlocks = deadlocks_of(total);
    if deadlocks.is_empty() {
        return Err(Error::NoAbsorbingState);
    }
    let mut is_deadlock = vec![false; total.rows()];
    for &d in &deadlocks {
        is_deadlock[d] = true;
    }
    let transient: Vec<usize> = (0..total.rows()).filter(|&q| !is_deadlock[q]).collect();
    let mut permutation = vec![0; total.rows()];
    for (pos, &q) in transient.iter().chain(&deadlocks).enumerate() {
        permutation[q] = pos;
    }
    Ok(AbsorbingDecomposition {
        s_block: total.select(&transient, &transient),
        t_block: total.select(&transient, &deadlocks),
        transient_states: transient,
        deadlock_states: deadlocks,
        permutation,
    })
}

fn reach_closed<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize) -> Result<(MarkovAutomaton<S>, Matrix<S>)> {
    require_closed(m)?;
    let (sub, _) = m.reach(q0)?;
    let total = sub.total_matrix();
    Ok((sub, total))
}

/// Probability of occupying a deadlock at step `k` when starting in `q0`.
/// Deadlocks are absorbing, so this is also the probability of having
/// reached one within `k` steps.
pub fn deadlock_probability<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize, k: u64) -> Result<S> {
    let (_, total) = reach_closed(m, q0)?;
    let deadlocks = deadlocks_of(&total);
    let power = total.pow(k)?;
    Ok(deadlocks
        .iter()
        .fold(S::zero(), |acc, &d| acc + power.get(0, d)))
}

/// `deadlock_probability` for every step `0..=k_max`, by propagating the
/// state distribution one step at a time.
pub fn deadlock_series<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize, k_max: u64) -> Result<Vec<S>> {
    let (_, total) = reach_closed(m, q0)?;
    let deadlocks = deadlocks_of(&total);
    let mut x = vec![S::zero(); total.rows()];
    x[0] = S::one();
    let mut series = Vec::with_capacity(k_max as usize + 1);
    for step in 0..=k_max {
        series.push(
            deadlocks
                .iter()
                .fold(S::zero(), |acc, &d| acc + x[d].clone()),
        );
        if step < k_max {
            x = total.vec_mul(&x)?;
        }
    }
    Ok(series)
}

/// Limiting absorption probabilities into each reachable deadlock.
#[derive(Debug, Clone, PartialEq)]
pub struct Absorption<S> {
    pub deadlocks: Vec<StateLabel>,
    pub probabilities: Vec<S>,
}

impl<S: Scalar> Absorption<S> {
    pub fn total(&self) -> S {
        self.probabilities.iter().fold(S::zero(), |a, p| a + p.clone())
    }
}

/// Solves `(I - S) X = T` on the reachable part and returns the row of `q0`.
pub fn limit_absorption<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize) -> Result<Absorption<S>> {
    let (sub, total) = reach_closed(m, q0)?;
    let dec = decompose(&total)?;
    let deadlocks: Vec<StateLabel> = dec
        .deadlock_states
        .iter()
        .map(|&d| sub.states()[d].clone())
        .collect();
    if let Some(pos) = dec.deadlock_states.iter().position(|&d| d == 0) {
        let probabilities = (0..deadlocks.len())
            .map(|i| if i == pos { S::one() } else { S::zero() })
            .collect();
        return Ok(Absorption {
            deadlocks,
            probabilities,
        });
    }
    let n = dec.transient_states.len();
    let system = Matrix::identity(n).sub(&dec.s_block)?;
    let x = match system.solve(&dec.t_block) {
        Ok(x) => x,
        Err(Error::Singular { .. }) => return Err(Error::Divergence),
        Err(e) => return Err(e),
    };
    let row = dec.permutation[0];
    Ok(Absorption {
        probabilities: (0..deadlocks.len()).map(|d| x.get(row, d)).collect(),
        deadlocks,
    })
}

/// Graph-level check of the hypotheses guaranteeing absorption with probability one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    /// Exactly one reachable deadlock.
    pub unique_deadlock: bool,
    pub deadlocks: Vec<StateLabel>,
    /// Every reachable non-deadlock state has a positive path back to `q0`.
    pub return_paths: bool,
    pub return_path_failure: Option<StateLabel>,
    /// Every reachable state has a positive self-loop.
    pub self_loops: bool,
    pub self_loop_failure: Option<StateLabel>,
    /// Smallest `k` with the absorption block of the `k`-th power strictly
    /// positive, if found within `|reachable|^2` steps.
    pub k0: Option<u64>,
}

impl ConvergenceReport {
    pub fn all_conditions_hold(&self) -> bool {
        self.unique_deadlock && self.return_paths && self.self_loops
    }
}

/// Reverse breadth-first distances to `target` along positive entries.
fn distances_to<S: Scalar>(total: &Matrix<S>, target: usize) -> Vec<Option<u64>> {
    let n = total.rows();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, v) in total.iter() {
        if v.is_positive() {
            reverse[j].push(i);
        }
    }
    let mut dist = vec![None; n];
    dist[target] = Some(0);
    let mut queue = VecDeque::from([target]);
    while let Some(j) = queue.pop_front() {
        let d = dist[j].expect("queued states have a distance");
        for &i in &reverse[j] {
            if dist[i].is_none() {
                dist[i] = Some(d + 1);
                queue.push_back(i);
            }
        }
    }
    dist
}

pub fn verify_convergence<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize) -> Result<ConvergenceReport> {
    let (sub, total) = reach_closed(m, q0)?;
    let labels = sub.states();
    let deadlocks = deadlocks_of(&total);
    let mut is_deadlock = vec![false; total.rows()];
    for &d in &deadlocks {
        is_deadlock[d] = true;
    }

    let to_start = distances_to(&total, 0);
    let return_path_failure = (0..total.rows())
        .find(|&q| !is_deadlock[q] && to_start[q].is_none())
        .map(|q| labels[q].clone());
    let self_loop_failure = (0..total.rows())
        .find(|&q| !total.get(q, q).is_positive())
        .map(|q| labels[q].clone());

    let cap = (total.rows() as u64).saturating_mul(total.rows() as u64);
    let k0 = if deadlocks.is_empty() {
        None
    } else {
        let mut worst = Some(0u64);
        for &d in &deadlocks {
            let dist = distances_to(&total, d);
            for q in (0..total.rows()).filter(|&q| !is_deadlock[q]) {
                worst = match (worst, dist[q]) {
                    (Some(w), Some(x)) => Some(w.max(x)),
                    _ => None,
                };
            }
        }
        worst.filter(|&k| k <= cap)
    };

    Ok(ConvergenceReport {
        unique_deadlock: deadlocks.len() == 1,
        deadlocks: deadlocks.iter().map(|&d| labels[d].clone()).collect(),
        return_paths: return_path_failure.is_none(),
        return_path_failure,
        self_loops: self_loop_failure.is_none(),
        self_loop_failure,
        k0,
    })
}

/// Monte Carlo estimate of the deadlock probability at step `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationEstimate {
    pub trajectories: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

/// Per-state cumulative weights for inversion sampling.
struct Sampler {
    rows: Vec<(Vec<f64>, Vec<usize>)>,
    deadlock: Vec<bool>,
}

impl Sampler {
    fn new<S: Scalar>(total: &Matrix<S>) -> Self {
        let rows = (0..total.rows())
            .map(|q| {
                let mut acc = 0.0;
                let mut cumulative = Vec::new();
                let mut targets = Vec::new();
                for (j, v) in total.row(q) {
                    acc += v.to_f64();
                    cumulative.push(acc);
                    targets.push(*j);
                }
                (cumulative, targets)
            })
            .collect();
        let mut deadlock = vec![false; total.rows()];
        for d in deadlocks_of(total) {
            deadlock[d] = true;
        }
        Self { rows, deadlock }
    }

    /// Trajectory `index` draws from ChaCha8 keyed by `seed` on stream `index`,
    /// so every trajectory is independent of scheduling.
    fn run(&self, seed: u64, index: u64, steps: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut q = 0;
        for _ in 0..steps {
            let (cumulative, targets) = &self.rows[q];
            let Some(&row_total) = cumulative.last() else {
                break;
            };
            let u = unit_interval(rng.next_u64()) * row_total;
            let pos = cumulative.partition_point(|&c| c <= u).min(targets.len() - 1);
            q = targets[pos];
        }
        self.deadlock[q]
    }
}

/// Top 53 bits of `x` as a float in `[0, 1)`.
fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples `n` independent `k`-step trajectories from `q0` on the global
/// rayon pool.
pub fn simulate<S: Scalar>(m: &MarkovAutomaton<S>, q0: usize, k: u64, n: u64, seed: u64) -> Result<SimulationEstimate> {
    let (_, total) = reach_closed(m, q0)?;
    if n == 0 {
        return Err(Error::Invalid("at least one trajectory is required".into()));
    }
    let sampler = Sampler::new(&total);
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| sampler.run(seed, i, k))
        .count() as u64;
    let estimate = hits as f64 / n as f64;
    Ok(SimulationEstimate {
        trajectories: n,
        hits,
        estimate,
        std_error: (estimate * (1.0 - estimate) / n as f64).sqrt(),
        seed,
    })
}

/// [`simulate`] on a dedicated pool of `workers` threads.
pub fn simulate_with_workers<S: Scalar>(
    m: &MarkovAutomaton<S>,
    q0: usize,
    k: u64,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationEstimate> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    pool.install(|| simulate(m, q0, k, n, seed))
}
