//! The dining philosophers: a philosopher, a fork, and the closed ring of
//! `n` of each.

use crate::algebra::{parallel_markov, series_markov, standard_constant, ConstantKind};
use crate::alphabet::{Alphabet, StateLabel};
use crate::automaton::{MarkovAutomaton, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::dsl::{print_model, AlphabetDecl, AutomatonDecl, Expr, Ident, Item, ModelDocument, Span, SystemDecl};
use crate::scalar::{Rational, Scalar};

/// `A = {eps, t, r}`: take and release.
pub fn fork_alphabet() -> Alphabet {
    Alphabet::atomic("A", ["t", "r"]).expect("distinct symbols")
}

const EPS: usize = 0;
const TAKE: usize = 1;
const RELEASE: usize = 2;

fn numbered_states(n: usize) -> Vec<StateLabel> {
    (1..=n).map(|i| StateLabel::atom(i.to_string())).collect()
}

/// Philosopher with states 1 (thinking), 2 (holds left fork), 3 (eating),
/// 4 (released left fork). Every state idles with probability 1/2.
pub fn phil<S: Scalar>() -> MarkovAutomaton<S> {
    let half = || S::from_ratio(1, 2);
    let mut transitions: Vec<_> = (0..4).map(|q| (EPS, EPS, q, q, half())).collect();
    transitions.extend([
        (TAKE, EPS, 0, 1, half()),
        (EPS, TAKE, 1, 2, half()),
        (RELEASE, EPS, 2, 3, half()),
        (EPS, RELEASE, 3, 0, half()),
    ]);
    let w = WeightedAutomaton::from_transitions(fork_alphabet(), fork_alphabet(), numbered_states(4), transitions)
        .expect("well-formed philosopher");
    MarkovAutomaton::new(w).expect("philosopher is Markov")
}

/// Fork with states 1 (free), 2 (taken to the left), 3 (taken to the right).
pub fn fork<S: Scalar>() -> MarkovAutomaton<S> {
    let third = || S::from_ratio(1, 3);
    let half = || S::from_ratio(1, 2);
    let transitions = vec![
        (EPS, EPS, 0, 0, third()),
        (EPS, EPS, 1, 1, half()),
        (EPS, EPS, 2, 2, half()),
        (TAKE, EPS, 0, 1, third()),
        (EPS, TAKE, 0, 2, third()),
        (RELEASE, EPS, 1, 0, half()),
        (EPS, RELEASE, 2, 0, half()),
    ];
    let w = WeightedAutomaton::from_transitions(fork_alphabet(), fork_alphabet(), numbered_states(3), transitions)
        .expect("well-formed fork");
    MarkovAutomaton::new(w).expect("fork is Markov")
}

/// `unit(A) . ((Phil . Fork . ... . Phil . Fork) x id(A)) . counit(A)` with
/// `n` philosophers and `n` forks.
pub fn dining<S: Scalar>(n: usize) -> Result<MarkovAutomaton<S>> {
    let phils = vec![phil(); n];
    let forks = vec![fork(); n];
    dining_with(&phils, &forks)
}

/// Dining ring with individual philosophers and forks. All components must
/// have the same interface alphabet on both sides.
pub fn dining_with<S: Scalar>(phils: &[MarkovAutomaton<S>], forks: &[MarkovAutomaton<S>]) -> Result<MarkovAutomaton<S>> {
    if phils.is_empty() || phils.len() != forks.len() {
        return Err(Error::Invalid(format!(
            "need n >= 1 philosophers and as many forks, got {} and {}",
            phils.len(),
            forks.len()
        )));
    }
    let a = phils[0].left().clone();
    for c in phils.iter().chain(forks) {
        for side in [c.left(), c.right()] {
            if !side.same_symbols(&a) {
                return Err(Error::InterfaceMismatch {
                    left: side.describe(),
                    right: a.describe(),
                });
            }
        }
    }
    let mut ring: Option<MarkovAutomaton<S>> = None;
    for (p, f) in phils.iter().zip(forks) {
        let pair = series_markov(p, f)?;
        ring = Some(match ring {
            None => pair,
            Some(acc) => series_markov(&acc, &pair)?,
        });
    }
    let ring = ring.expect("n >= 1");
    let wired = parallel_markov(&ring, &standard_constant(ConstantKind::Identity, &a, None)?);
    let opened = series_markov(&standard_constant(ConstantKind::Unit, &a, None)?, &wired)?;
    series_markov(&opened, &standard_constant(ConstantKind::Counit, &a, None)?)
}

/// The state `(1, 1, ..., 1)` of the `n`-philosopher ring.
pub fn dining_initial_state(n: usize) -> StateLabel {
    StateLabel::from_parts(vec!["1"; 2 * n])
}

/// The state `(2, 3, ..., 2, 3)`: every philosopher holds the left fork.
pub fn dining_deadlock_state(n: usize) -> StateLabel {
    StateLabel::from_parts((0..n).flat_map(|_| ["2", "3"]))
}

/// Name of the system in [`dining_document`].
pub const DINING_SYSTEM: &str = "Dining";

/// The `n`-philosopher ring as a model document: alphabet `A`, automata
/// `Phil` and `Fork`, and the system `Dining`.
pub fn dining_document(n: usize) -> Result<ModelDocument> {
    if n == 0 {
        return Err(Error::Invalid("need n >= 1 philosophers".into()));
    }
    let a = Ident::new(fork_alphabet().name());
    let chain = (0..2 * n)
        .map(|i| Expr::name(if i % 2 == 0 { "Phil" } else { "Fork" }))
        .reduce(Expr::series)
        .expect("n >= 1");
    let body = Expr::parallel(chain, Expr::constant(ConstantKind::Identity, &[&a.name]));
    let expr = Expr::series(
        Expr::series(Expr::constant(ConstantKind::Unit, &[&a.name]), body),
        Expr::constant(ConstantKind::Counit, &[&a.name]),
    );
    Ok(ModelDocument {
        items: vec![
            Item::Alphabet(AlphabetDecl::from_alphabet(&fork_alphabet())?),
            Item::Automaton(AutomatonDecl::from_automaton("Phil", &phil::<Rational>())?),
            Item::Automaton(AutomatonDecl::from_automaton("Fork", &fork::<Rational>())?),
            Item::System(SystemDecl {
                name: Ident::new(DINING_SYSTEM),
                expr,
                span: Span::default(),
            }),
        ],
    })
}

/// `.mkv` source of [`dining_document`].
pub fn dining_source(n: usize) -> Result<String> {
    Ok(print_model(&dining_document(n)?))
}
