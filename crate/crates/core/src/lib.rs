//! Compositional Markov automata with two labeled interfaces.
//!
//! Automata are built from small components with a parallel composite, a
//! series composite that synchronizes on a shared interface, and relation
//! constants. Closed systems can then be analysed for deadlock: exact
//! `k`-step deadlock probabilities, absorption limits, and a Monte Carlo
//! cross-check.
//!
//! Every matrix and automaton is generic over a [`Scalar`]: exact
//! [`Rational`] or `f64`.

pub mod algebra;
pub mod alphabet;
pub mod analysis;
pub mod automaton;
pub mod dsl;
pub mod error;
pub mod laws;
pub mod matrix;
pub mod models;
pub mod scalar;

pub use algebra::{
    automata_equal, automata_identical, constant_relation, parallel, parallel_markov, relation_automaton, series_markov,
    series_weighted, standard_constant, ConstantKind, Relation,
};
pub use alphabet::{Alphabet, StateLabel, Symbol, EPS};
pub use automaton::{AutomatonJson, Behaviour, MarkovAutomaton, ValidationReport, Violation, WeightedAutomaton};
pub use error::{Error, Result};
pub use matrix::{kron, mat_mul, mat_pow, solve_linear, Matrix};
pub use scalar::{ratio, Rational, Scalar, ScalarMode};
pub use dsl::{elaborate, parse_model, print_model, Diagnostic, ModelDocument};
