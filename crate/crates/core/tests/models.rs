use markovspan::analysis::{find_deadlocks, verify_convergence};
use markovspan::models::*;
use markovspan::*;

#[test]
fn ring_sizes() {
    for n in 1..=3 {
        let m = dining::<Rational>(n).unwrap();
        assert_eq!(m.num_states(), 12usize.pow(n as u32));
        assert!(m.left().is_singleton() && m.right().is_singleton());
        assert!(m.is_markov());
        assert_eq!(m.states()[0], dining_initial_state(n));
    }
    assert!(dining::<Rational>(0).is_err());
}

#[test]
fn float_ring_of_four_is_markov() {
    let m = dining::<f64>(4).unwrap();
    assert_eq!(m.num_states(), 12usize.pow(4));
    assert!(m.is_markov());
}

#[test]
fn unique_deadlock_pattern() {
    for n in 1..=3 {
        let m = dining::<Rational>(n).unwrap();
        let q0 = m.state_index(&dining_initial_state(n)).unwrap();
        let (r, _) = m.reach(q0).unwrap();
        let d: Vec<StateLabel> = find_deadlocks(&r).unwrap().into_iter().map(|i| r.states()[i].clone()).collect();
        assert_eq!(d, vec![dining_deadlock_state(n)], "n = {n}");
        assert!(verify_convergence(&m, q0).unwrap().all_conditions_hold(), "n = {n}");
    }
    assert_eq!(dining_deadlock_state(1).to_string(), "(2,3)");
    assert_eq!(dining_deadlock_state(3).to_string(), "(2,3,2,3,2,3)");
}

fn reweighted_phil(p: (i64, i64), seed: i64) -> MarkovAutomaton<Rational> {
    // scale each transition of the philosopher by a different positive weight
    let base = phil::<Rational>();
    let mut w = base.as_weighted().clone();
    let mut i = 0;
    for ((a, b), m) in base.family() {
        for (q, q2, v) in m.iter() {
            i += 1;
            let factor = ratio(p.0 + (i * seed) % 5, p.1);
            w = w.with_entry(a, b, q, q2, v.clone() * factor).unwrap();
        }
    }
    w.normalize().unwrap()
}

fn reweighted_fork(seed: i64) -> MarkovAutomaton<Rational> {
    let base = fork::<Rational>();
    let mut w = base.as_weighted().clone();
    let mut i = 0;
    for ((a, b), m) in base.family() {
        for (q, q2, v) in m.iter() {
            i += 1;
            w = w.with_entry(a, b, q, q2, v.clone() * ratio(1 + (i * seed) % 7, 2)).unwrap();
        }
    }
    w.normalize().unwrap()
}

#[test]
fn positive_reweighting_keeps_convergence() {
    for seed in 1..=4 {
        let phils = vec![reweighted_phil((1, 3), seed), reweighted_phil((2, 1), seed + 1)];
        let forks = vec![reweighted_fork(seed), reweighted_fork(seed + 2)];
        assert!(!automata_identical(&phils[0], &phil::<Rational>()));
        let m = dining_with(&phils, &forks).unwrap();
        let q0 = m.state_index(&dining_initial_state(2)).unwrap();
        let report = verify_convergence(&m, q0).unwrap();
        assert!(report.all_conditions_hold(), "seed {seed}: {report:?}");
    }
}

#[test]
fn custom_components_need_matching_interfaces() {
    let other = Alphabet::atomic("A", ["t"]).unwrap();
    let odd = WeightedAutomaton::from_transitions(other.clone(), other, vec![StateLabel::atom("1")], [(0, 0, 0, 0, ratio(1, 1))])
        .unwrap();
    let odd = MarkovAutomaton::new(odd).unwrap();
    let err = dining_with(&[odd], &[fork::<Rational>()]).unwrap_err();
    assert!(matches!(err, Error::InterfaceMismatch { .. }));
    assert!(dining_with::<Rational>(&[phil()], &[]).is_err());
}

#[test]
fn emitted_source_lists_components() {
    let src = dining_source(3).unwrap();
    assert!(src.contains("alphabet A = { eps, t, r };"));
    assert!(src.contains("system Dining = unit(A) . (Phil . Fork . Phil . Fork . Phil . Fork) x id(A) . counit(A);"), "{src}");
}
