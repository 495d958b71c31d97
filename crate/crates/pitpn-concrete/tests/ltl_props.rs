//! Cross-checks the automaton-based LTL checker against a direct
//! evaluation of formulas on ultimately periodic runs of the sampled
//! graph.

use pitpn_concrete::{
    build_graph, eval_lasso, model_check_ltl, CompiledNet, ConcreteState, Ltl, LtlOutcome,
    SampledGraph, SearchOptions,
};
use pitpn_core::formula::Rel;
use pitpn_core::rat::{rat, Int, Rat};
use pitpn_core::{PlaceId, StatePredicate, TransitionId};
use proptest::prelude::*;

fn eval_prop(net: &CompiledNet, pred: &StatePredicate, s: &ConcreteState) -> bool {
    let tokens = |p: &PlaceId| s.tokens(net, p).map(|n| Rat::from_integer(Int::from(n)));
    let clock = |t: &TransitionId| net.transition_index(t).map(|ti| s.clocks[ti].clone());
    pred.eval_concrete_in(&net.places, &tokens, &clock, s.global.as_ref())
        .expect("propositions are well-formed")
}

fn prop_leaf() -> impl Strategy<Value = Ltl> {
    prop_oneof![
        Just(Ltl::prop(StatePredicate::place_cmp("p2", Rel::Eq, 2))),
        Just(Ltl::prop(StatePredicate::place_cmp("p3", Rel::Eq, 1))),
        Just(Ltl::prop(StatePredicate::place_cmp("p3", Rel::Eq, 0))),
        Just(Ltl::prop(StatePredicate::place_cmp("p1", Rel::Ge, 1))),
        Just(Ltl::prop(StatePredicate::KSafe(1))),
        Just(Ltl::True),
    ]
}

fn ltl_formula() -> impl Strategy<Value = Ltl> {
    prop_leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::until(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::release(a, b)),
            inner.clone().prop_map(Ltl::not_),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.prop_map(Ltl::globally),
        ]
    })
}

/// A lasso through the totalized graph: state indices with a loop-back
/// position. Deadlocked states stutter.
fn walk_lasso(graph: &SampledGraph, choices: &[u8]) -> (Vec<usize>, usize) {
    let mut word = vec![0usize];
    let mut seen_at = std::collections::HashMap::from([(0usize, 0usize)]);
    for &c in choices {
        let cur = *word.last().unwrap();
        let edges = &graph.edges[cur];
        if edges.is_empty() {
            let last = word.len() - 1;
            return (word, last);
        }
        let (_, next) = edges[c as usize % edges.len()].clone();
        if let Some(&j) = seen_at.get(&next) {
            return (word, j);
        }
        seen_at.insert(next, word.len());
        word.push(next);
    }
    // Close the walk by stuttering or looping at the final state.
    let cur = *word.last().unwrap();
    if graph.edges[cur].is_empty() {
        let last = word.len() - 1;
        return (word, last);
    }
    // Follow first edges until a repeat; guaranteed within |S| steps.
    loop {
        let cur = *word.last().unwrap();
        let (_, next) = graph.edges[cur]
            .first()
            .cloned()
            .unwrap_or((pitpn_concrete::Event::Tick(rat(0)), cur));
        if let Some(&j) = seen_at.get(&next) {
            return (word, j);
        }
        seen_at.insert(next, word.len());
        word.push(next);
    }
}

fn net34() -> CompiledNet {
    CompiledNet::compile(&pitpn_core::samples::producer_consumer_fixed(3, 4).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn checker_agrees_with_lasso_semantics(
        phi in ltl_formula(),
        seeds in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 1..40), 12),
    ) {
        let net = net34();
        let opts = SearchOptions::default();
        let graph = build_graph(&net, &opts).unwrap();
        prop_assert!(graph.complete);
        let verdict = model_check_ltl(&net, &phi, &opts).unwrap();
        let prop_fn = |p: &StatePredicate, si: &usize| eval_prop(&net, p, &graph.states[*si]);
        match verdict {
            LtlOutcome::CounterExample(lasso) => {
                // The reported run must genuinely violate the formula.
                lasso.stem.replay(&net).unwrap();
                prop_assert_eq!(
                    lasso.cycle.last().map(|(_, s)| s),
                    Some(lasso.stem.final_state())
                );
                let mut states: Vec<ConcreteState> =
                    std::iter::once(lasso.stem.initial.clone())
                        .chain(lasso.stem.steps.iter().map(|(_, s)| s.clone()))
                        .collect();
                for (_, s) in &lasso.cycle[..lasso.cycle.len() - 1] {
                    states.push(s.clone());
                }
                let loop_start = lasso.stem.len();
                let direct = |p: &StatePredicate, s: &ConcreteState| eval_prop(&net, p, s);
                prop_assert!(!eval_lasso(&phi, &states, loop_start, &direct));
            }
            LtlOutcome::Holds => {
                // Every sampled run must satisfy the formula.
                for seed in &seeds {
                    let (word, loop_start) = walk_lasso(&graph, seed);
                    prop_assert!(
                        eval_lasso(&phi, &word, loop_start, &prop_fn),
                        "sampled run violates a formula the checker accepted"
                    );
                }
            }
            LtlOutcome::Inconclusive(reason) => prop_assert!(false, "inconclusive: {reason}"),
        }
    }
}

#[test]
fn exhaustive_short_lassos_agree_on_fixed_formulas() {
    let net = net34();
    let opts = SearchOptions::default();
    let graph = build_graph(&net, &opts).unwrap();
    let p3_one = Ltl::prop(StatePredicate::place_cmp("p3", Rel::Eq, 1));
    let p3_zero = Ltl::prop(StatePredicate::place_cmp("p3", Rel::Eq, 0));
    let formulas = vec![
        Ltl::and(
            Ltl::globally(Ltl::eventually(p3_zero.clone())),
            Ltl::globally(Ltl::eventually(p3_one.clone())),
        ),
        Ltl::eventually(Ltl::prop(StatePredicate::place_cmp("p2", Rel::Eq, 2))),
        Ltl::globally(Ltl::prop(StatePredicate::KSafe(2))),
    ];
    let prop_fn = |p: &StatePredicate, si: &usize| eval_prop(&net, p, &graph.states[*si]);

    // Enumerate every lasso whose path uses at most `depth` edges.
    let mut lassos: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![0], 0)];
    let depth = 18;
    while let Some((path, _)) = stack.pop() {
        if lassos.len() > 4000 {
            break;
        }
        let cur = *path.last().unwrap();
        if graph.edges[cur].is_empty() {
            lassos.push((path.clone(), path.len() - 1));
            continue;
        }
        if path.len() > depth {
            continue;
        }
        for (_, next) in &graph.edges[cur] {
            if let Some(j) = path.iter().position(|s| s == next) {
                lassos.push((path.clone(), j));
            } else {
                let mut p2 = path.clone();
                p2.push(*next);
                stack.push((p2, 0));
            }
        }
    }
    assert!(!lassos.is_empty());

    for phi in formulas {
        let verdict = model_check_ltl(&net, &phi, &opts).unwrap();
        match verdict {
            LtlOutcome::Holds => {
                for (word, loop_start) in &lassos {
                    assert!(
                        eval_lasso(&phi, word, *loop_start, &prop_fn),
                        "enumerated run violates an accepted formula"
                    );
                }
            }
            LtlOutcome::CounterExample(_) => {
                // At least one enumerated run should also violate it.
                assert!(
                    lassos
                        .iter()
                        .any(|(w, ls)| !eval_lasso(&phi, w, *ls, &prop_fn)),
                    "checker rejected but every short run satisfies the formula"
                );
            }
            LtlOutcome::Inconclusive(reason) => panic!("inconclusive: {reason}"),
        }
    }
}
