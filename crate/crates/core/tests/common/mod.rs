#![allow(dead_code)]

use markovspan::models::{dining, dining_initial_state};
use markovspan::{ratio, MarkovAutomaton, Matrix, Rational, StateLabel};

/// Reachable states of the two-philosopher ring in the order the published
/// matrix uses.
pub const DF2_ORDER: [&str; 8] = [
    "(1,1,1,1)", "(1,3,3,2)", "(3,2,1,3)", "(1,1,4,2)", "(4,2,1,1)", "(1,3,2,1)", "(2,1,1,3)", "(2,3,2,3)",
];

/// The published one-step matrix of the reachable two-philosopher ring.
pub fn df2_published() -> Matrix<Rational> {
    let rows: [[(i64, i64); 8]; 8] = {
        let z = (0, 1);
        let q = (1, 4);
        let h = (1, 2);
        let t = (1, 3);
        [
            [q, z, z, z, z, q, q, q],
            [z, h, z, h, z, z, z, z],
            [z, z, h, z, h, z, z, z],
            [h, z, z, h, z, z, z, z],
            [h, z, z, z, h, z, z, z],
            [z, t, z, z, z, t, z, t],
            [z, z, t, z, z, z, t, t],
            [z, z, z, z, z, z, z, (1, 1)],
        ]
    };
    Matrix::from_dense(rows.iter().map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect()).collect()).unwrap()
}

/// The ring, and the index of its all-ones state.
pub fn df2() -> (MarkovAutomaton<Rational>, usize) {
    let m = dining::<Rational>(2).unwrap();
    let q0 = m.state_index(&dining_initial_state(2)).unwrap();
    (m, q0)
}

/// Total matrix of `m` with its states listed in `order`.
pub fn total_in_order(m: &MarkovAutomaton<Rational>, order: &[&str]) -> Matrix<Rational> {
    let idx: Vec<usize> = order
        .iter()
        .map(|s| m.state_index(&StateLabel::parse(s)).unwrap_or_else(|| panic!("no state {s}")))
        .collect();
    m.total_matrix().select(&idx, &idx)
}
