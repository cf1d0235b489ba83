use markovspan::models::{fork, fork_alphabet, phil};
use markovspan::*;

const E: usize = 0;
const T: usize = 1;

#[test]
fn parallel_of_phil_and_fork() {
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    let pf = parallel(&p, &f);
    assert_eq!(pf.num_states(), 12);
    assert_eq!(pf.total_matrix(), kron(&p.total_matrix(), &f.total_matrix()));
    assert_eq!(pf.total_matrix().get(0, 0), ratio(1, 6));
    // ((1,1) -> (2,2)) under ((t,eps),(eps,eps)); Fork_{eps,eps}[1,2] = 0
    let a = pf.left().index_of(&Symbol::tuple(&[Symbol::atom("t"), Symbol::atom("eps")])).unwrap();
    let b = pf.right().index_of(&Symbol::tuple(&[Symbol::atom("eps"), Symbol::atom("eps")])).unwrap();
    assert_eq!(pf.entry(a, b, 0, 3 + 1), ratio(0, 1));
    assert!(pf.is_markov());
}

#[test]
fn parallel_with_trivial_automaton_is_reindexing() {
    let p = phil::<Rational>();
    let one = Alphabet::trivial();
    let unit = WeightedAutomaton::from_transitions(one.clone(), one, vec![StateLabel::unit()], [(0, 0, 0, 0, ratio(1, 1))])
        .unwrap();
    let pu = parallel(&p, &unit);
    let id = |n: usize| (0..n).collect::<Vec<_>>();
    assert!(automata_equal(&pu, &p, &id(4), &id(3), &id(3)).unwrap());
    assert_eq!(pu.states(), p.states());
}

#[test]
fn weighted_series_of_phil_and_fork() {
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    let pf = series_weighted(&p, &f).unwrap();
    // state (i, j) has index i * 3 + j
    assert_eq!(pf.entry(E, E, 0, 0), ratio(1, 6));
    assert_eq!(pf.entry(E, E, 3, 2 * 3 + 1), ratio(1, 6));
    assert_eq!(pf.states()[3].to_string(), "(2,1)");
}

#[test]
fn series_rejects_mismatched_interfaces() {
    let p = phil::<Rational>();
    let small = Alphabet::atomic("A", ["t"]).unwrap();
    let q = WeightedAutomaton::from_transitions(small.clone(), small, vec![StateLabel::atom("1")], [(0, 0, 0, 0, ratio(1, 1))])
        .unwrap();
    assert!(matches!(series_weighted(&p, &q), Err(Error::InterfaceMismatch { .. })));
    assert!(matches!(series_weighted(&q, &p), Err(Error::InterfaceMismatch { .. })));
}

#[test]
fn identity_composes_with_itself() {
    let a = fork_alphabet();
    let id = standard_constant::<Rational>(ConstantKind::Identity, &a, None).unwrap();
    for s in 0..3 {
        assert_eq!(id.entry(s, s, 0, 0), ratio(1, 3));
    }
    assert_eq!(id.family().count(), 3);
    let twice = series_markov(&id, &id).unwrap();
    assert!(automata_identical(&twice, &id));
    // before normalization each matching pair carries 1/9
    assert_eq!(series_weighted(&id, &id).unwrap().entry(T, T, 0, 0), ratio(1, 9));
}

#[test]
fn series_markov_is_associative_on_phil_and_fork() {
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    let lhs = series_markov(&series_markov(&p, &f).unwrap(), &p).unwrap();
    let rhs = series_markov(&p, &series_markov(&f, &p).unwrap()).unwrap();
    assert!(automata_identical(&lhs, &rhs));
}

#[test]
fn relation_weights_are_uniform() {
    let a = fork_alphabet();
    let unit = standard_constant::<Rational>(ConstantKind::Unit, &a, None).unwrap();
    assert!(unit.left().is_singleton());
    assert_eq!(unit.right().len(), 9);
    for s in a.symbols() {
        let pair = unit.right().index_of(&Symbol::tuple(&[s.clone(), s.clone()])).unwrap();
        assert_eq!(unit.entry(0, pair, 0, 0), ratio(1, 3));
    }
    assert_eq!(unit.family().count(), 3);
    let counit = standard_constant::<Rational>(ConstantKind::Counit, &a, None).unwrap();
    assert!(counit.right().is_singleton() && counit.family().count() == 3);
}

#[test]
fn relation_must_relate_null_symbols() {
    let a = fork_alphabet();
    let aa = a.product(&a);
    let t = Symbol::atom("t");
    let pairs = [(t.clone(), Symbol::tuple(&[t.clone(), t.clone()]))];
    assert!(matches!(Relation::new(a.clone(), aa, pairs), Err(Error::InvalidRelation(_))));
    assert!(Relation::new(a.clone(), a.clone(), [(t.clone(), Symbol::atom("zz"))]).is_err());
}

#[test]
fn constant_sizes() {
    let a = fork_alphabet();
    let b = Alphabet::atomic("B", ["u"]).unwrap();
    let copy = constant_relation(ConstantKind::Copy, &a, None).unwrap();
    assert_eq!(copy.len(), a.len());
    let merge = constant_relation(ConstantKind::Merge, &a, None).unwrap();
    assert_eq!(merge, copy.converse());
    let swap = constant_relation(ConstantKind::Swap, &a, Some(&b)).unwrap();
    assert_eq!(swap.len(), a.len() * b.len());
    let m = standard_constant::<Rational>(ConstantKind::Swap, &a, Some(&b)).unwrap();
    let x = m.left().index_of(&Symbol::tuple(&[Symbol::atom("t"), Symbol::atom("u")])).unwrap();
    let y = m.right().index_of(&Symbol::tuple(&[Symbol::atom("u"), Symbol::atom("t")])).unwrap();
    assert_eq!(m.entry(x, y, 0, 0), ratio(1, 6));
    assert!(matches!(constant_relation(ConstantKind::Swap, &a, None), Err(Error::MissingAlphabet(_))));
}

#[test]
fn equality_under_bijections() {
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    let id = |n: usize| (0..n).collect::<Vec<_>>();
    assert!(automata_equal(&p, &p, &id(4), &id(3), &id(3)).unwrap());
    assert!(!automata_equal(&p, &f, &id(4), &id(3), &id(3)).unwrap());
    assert!(matches!(automata_equal(&p, &p, &[0, 0, 1, 2], &id(3), &id(3)), Err(Error::NonBijective(_))));
    // rotating Phil's states does not preserve it
    assert!(!automata_equal(&p, &p, &[1, 2, 3, 0], &id(3), &id(3)).unwrap());
}

#[test]
fn parallel_is_associative_under_reassociation() {
    let (p, f) = (phil::<Rational>(), fork::<Rational>());
    let lhs = parallel(&parallel(&p, &f), &p);
    let rhs = parallel(&p, &parallel(&f, &p));
    assert!(automata_identical(&lhs, &rhs));
}
