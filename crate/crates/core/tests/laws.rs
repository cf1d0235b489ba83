//! Randomized checks of the algebraic laws on small rational automata.

use markovspan::laws::*;
use markovspan::models::{fork, phil};
use markovspan::{ratio, Alphabet, AutomatonJson, MarkovAutomaton, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 200;

fn rng(law: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + law)
}

fn alphabets(rng: &mut ChaCha8Rng, shape: RandomShape) -> [Alphabet; 4] {
    ["A", "B", "C", "D"].map(|n| random_alphabet(rng, n, shape))
}

#[test]
fn normalization_is_idempotent_and_ignores_row_scaling() {
    let mut rng = rng(1);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, ..] = alphabets(&mut rng, shape);
        let w = random_weighted(&mut rng, &a, &b, shape);
        assert!(normalize_idempotent(&w).unwrap());
        let factors: Vec<Rational> = (0..w.num_states())
            .map(|_| ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)))
            .collect();
        assert!(row_scaling_invariant(&w, &factors).unwrap());
    }
}

#[test]
fn total_matrix_of_power_is_matrix_power() {
    let mut rng = rng(2);
    let shape = RandomShape::default();
    for case in 0..CASES {
        let [a, b, ..] = alphabets(&mut rng, shape);
        let w = random_weighted(&mut rng, &a, &b, shape);
        let k = case % 5;
        assert!(total_of_power(&w, k).unwrap(), "case {case}");
    }
}

#[test]
fn markov_paths_sum_to_one() {
    let mut rng = rng(3);
    let shape = RandomShape {
        max_symbols: 2,
        ..Default::default()
    };
    for case in 0..CASES {
        let [a, b, ..] = alphabets(&mut rng, shape);
        let m = random_markov(&mut rng, &a, &b, shape);
        assert!(paths_sum_to_one(&m, case % 6).unwrap(), "case {case}");
    }
}

#[test]
fn parallel_commutes_with_normalization() {
    let mut rng = rng(4);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, c, d] = alphabets(&mut rng, shape);
        let q = random_weighted(&mut rng, &a, &b, shape);
        let r = random_weighted(&mut rng, &c, &d, shape);
        assert!(parallel_commutes_with_normalize(&q, &r).unwrap());
    }
}

#[test]
fn weighted_series_is_associative() {
    let mut rng = rng(5);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, c, d] = alphabets(&mut rng, shape);
        let q = random_weighted(&mut rng, &a, &b, shape);
        let r = random_weighted(&mut rng, &b, &c, shape);
        let s = random_weighted(&mut rng, &c, &d, shape);
        assert!(series_weighted_associative(&q, &r, &s).unwrap());
    }
}

#[test]
fn normalization_passes_through_weighted_series() {
    let mut rng = rng(6);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, c, _] = alphabets(&mut rng, shape);
        let q = random_weighted(&mut rng, &a, &b, shape);
        let r = random_weighted(&mut rng, &b, &c, shape);
        assert!(series_normalize_absorbs(&q, &r).unwrap());
        assert!(eps_positivity_preserved(&q, &r).unwrap());
    }
}

#[test]
fn markov_series_is_associative() {
    let mut rng = rng(7);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, c, d] = alphabets(&mut rng, shape);
        let q = random_markov(&mut rng, &a, &b, shape);
        let r = random_markov(&mut rng, &b, &c, shape);
        let s = random_markov(&mut rng, &c, &d, shape);
        assert!(series_markov_associative(&q, &r, &s).unwrap());
    }
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    assert!(series_markov_associative(&p, &f, &p).unwrap());
}

#[test]
fn power_distributes_over_parallel_composite() {
    let mut rng = rng(8);
    let shape = RandomShape {
        max_symbols: 2,
        max_states: 2,
        ..Default::default()
    };
    for case in 0..CASES {
        let [a, b, c, d] = alphabets(&mut rng, shape);
        let q = random_markov(&mut rng, &a, &b, shape);
        let r = random_markov(&mut rng, &c, &d, shape);
        let k = 1 + case % 3;
        assert!(power_distributes_over_parallel(&q, &r, k).unwrap(), "case {case}");
    }
}

#[test]
fn identity_is_a_unit_for_series() {
    let mut rng = rng(9);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, ..] = alphabets(&mut rng, shape);
        assert!(unit_laws(&random_markov(&mut rng, &a, &b, shape)).unwrap());
    }
    assert!(unit_laws(&phil::<Rational>()).unwrap());
}

#[test]
fn frobenius_law_for_small_alphabets() {
    for others in [vec!["x"], vec!["x", "y"]] {
        let a = Alphabet::atomic("A", others).unwrap();
        assert!(frobenius(&a).unwrap(), "{}", a.describe());
    }
}

#[test]
fn series_positivity_holds_for_strictly_positive_null_rows() {
    let mut rng = rng(10);
    let shape = RandomShape::default();
    for _ in 0..CASES {
        let [a, b, c, _] = alphabets(&mut rng, shape);
        let q = random_markov(&mut rng, &a, &b, shape);
        let r = random_markov(&mut rng, &b, &c, shape);
        assert!(eps_positivity_preserved(&q, &r).unwrap());
    }
}

fn load_witness() -> (MarkovAutomaton<Rational>, MarkovAutomaton<Rational>, usize) {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/series_power_witness.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let q: AutomatonJson = serde_json::from_value(v["q"].clone()).unwrap();
    let r: AutomatonJson = serde_json::from_value(v["r"].clone()).unwrap();
    (
        MarkovAutomaton::from_json(&q).unwrap(),
        MarkovAutomaton::from_json(&r).unwrap(),
        v["k"].as_u64().unwrap() as usize,
    )
}

#[test]
fn power_does_not_distribute_over_series() {
    let (q, r, k) = load_witness();
    assert!(!power_distributes_over_series(&q, &r, k).unwrap());
}

/// Regenerates the witness fixture: `cargo test --test laws -- --ignored --nocapture`.
#[test]
#[ignore]
fn search_series_power_witness() {
    let mut rng = rng(99);
    let shape = RandomShape {
        max_states: 2,
        max_symbols: 2,
        max_weight: 3,
    };
    for attempt in 0.. {
        let [a, b, c, _] = alphabets(&mut rng, shape);
        let q = random_markov(&mut rng, &a, &b, shape);
        let r = random_markov(&mut rng, &b, &c, shape);
        if !power_distributes_over_series(&q, &r, 2).unwrap() {
            let doc = serde_json::json!({ "k": 2, "q": q.to_json(), "r": r.to_json() });
            println!("attempt {attempt}\n{}", serde_json::to_string_pretty(&doc).unwrap());
            return;
        }
    }
}
