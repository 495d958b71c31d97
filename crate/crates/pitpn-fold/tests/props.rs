//! Property tests for the subsumption order. Skip without a solver.

use pitpn_core::expr::{LinExpr, Var};
use pitpn_core::formula::{Formula, Rel};
use pitpn_core::samples;
use pitpn_fold::{project_now, subsumes, SubsumeOutcome};
use pitpn_smt::Solver;
use pitpn_strategy::Strategy;
use pitpn_symbolic::{SymState, SymbolicEngine};
use proptest::prelude::*;

fn solver() -> Option<Solver> {
    match Solver::from_env(None) {
        Ok(s) => Some(s),
        Err(_) => {
            eprintln!("skipping: no SMT solver available");
            None
        }
    }
}

fn producer_below_four() -> pitpn_core::net::Net {
    samples::producer_consumer().unwrap().with_extra_constraint(Formula::cmp(
        LinExpr::var(Var::real("a")),
        Rel::Lt,
        LinExpr::from_int(4),
    ))
}

/// Walks the symbolic graph following `choices` and returns the states.
fn walk(solver: &mut Solver, net: &pitpn_core::net::Net, choices: &[usize]) -> Vec<SymState> {
    let mut engine = SymbolicEngine::new(net);
    let mut states = vec![engine.init_state(solver).unwrap()];
    for &c in choices {
        let succs = engine
            .successors(solver, states.last().unwrap(), &Strategy::all())
            .unwrap();
        if succs.is_empty() {
            break;
        }
        states.push(succs[c % succs.len()].1.clone());
    }
    states
}

/// Returns `state` with `a <= bound` conjoined onto its constraint.
fn capped(state: &SymState, bound: i64) -> SymState {
    let mut out = state.clone();
    out.constraint = Formula::and2(
        out.constraint.clone(),
        Formula::cmp(LinExpr::var(Var::real("a")), Rel::Le, LinExpr::from_int(bound)),
    );
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    /// Every reachable projection covers itself.
    #[test]
    fn subsumption_is_reflexive_along_walks(choices in proptest::collection::vec(0usize..8, 0..5)) {
        let Some(mut solver) = solver() else { return Ok(()) };
        let net = producer_below_four();
        for state in walk(&mut solver, &net, &choices) {
            let u = project_now(&net, &state);
            prop_assert_eq!(subsumes(&mut solver, &u, &u).unwrap(), SubsumeOutcome::Subsumed);
        }
    }

    /// Tightening the parameter bound twice yields a descending chain,
    /// and the order composes across the middle element.
    #[test]
    fn strengthening_chains_compose_transitively(
        choices in proptest::collection::vec(0usize..8, 0..5),
        hi in 1i64..4,
        lo in 0i64..2,
    ) {
        prop_assume!(lo <= hi);
        let Some(mut solver) = solver() else { return Ok(()) };
        let net = producer_below_four();
        let states = walk(&mut solver, &net, &choices);
        let state = states.last().unwrap();

        let u0 = project_now(&net, state);
        let u1 = project_now(&net, &capped(state, hi));
        let u2 = project_now(&net, &capped(state, lo));

        prop_assert_eq!(subsumes(&mut solver, &u1, &u0).unwrap(), SubsumeOutcome::Subsumed);
        prop_assert_eq!(subsumes(&mut solver, &u2, &u1).unwrap(), SubsumeOutcome::Subsumed);
        prop_assert_eq!(subsumes(&mut solver, &u2, &u0).unwrap(), SubsumeOutcome::Subsumed);
    }
}
