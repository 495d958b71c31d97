//! Folding tests against a real solver process. Every test skips
//! cleanly when no solver is installed.

use pitpn_core::expr::{LinExpr, Var};
use pitpn_core::formula::{Formula, Rel};
use pitpn_core::pred::StatePredicate;
use pitpn_core::rat::Rat;
use pitpn_core::samples;
use pitpn_core::validate::SatVerdict;
use pitpn_fold::{
    folded_search, project_now, subsumes, FoldedSearchOptions, ProjectedState, SubsumeOutcome,
    VisitedSet,
};
use pitpn_smt::{Model, ModelOutcome, Solver, Validity};
use pitpn_symbolic::{smt_search, SymState, SymbolicSearchOptions};

fn solver() -> Option<Solver> {
    match Solver::from_env(None) {
        Ok(s) => Some(s),
        Err(_) => {
            eprintln!("skipping: no SMT solver available");
            None
        }
    }
}

fn a() -> Var {
    Var::real("a")
}

/// Producer/consumer restricted to `0 <= a < 4`, where one-safety
/// holds and the symbolic state space folds into finitely many classes.
fn producer_below_four() -> pitpn_core::net::Net {
    samples::producer_consumer().unwrap().with_extra_constraint(Formula::cmp(
        LinExpr::var(a()),
        Rel::Lt,
        LinExpr::from_int(4),
    ))
}

#[test]
fn subsumption_is_reflexive_and_orders_constraint_strength() {
    let Some(mut solver) = solver() else { return };
    let net = samples::producer_consumer().unwrap();
    let init = SymState::initial(&net, false);
    let u = project_now(&net, &init);
    assert_eq!(subsumes(&mut solver, &u, &u).unwrap(), SubsumeOutcome::Subsumed);

    // Same state text under a stronger constraint is covered by the
    // weaker one, but not the other way around.
    let mut narrowed = init.clone();
    narrowed.constraint = Formula::and2(
        narrowed.constraint.clone(),
        Formula::cmp(LinExpr::var(a()), Rel::Ge, LinExpr::from_int(4)),
    );
    let n = project_now(&net, &narrowed);
    assert_eq!(subsumes(&mut solver, &n, &u).unwrap(), SubsumeOutcome::Subsumed);
    assert_eq!(subsumes(&mut solver, &u, &n).unwrap(), SubsumeOutcome::NotSubsumed);

    // Flag mismatch never subsumes, whatever the constraints say.
    let mut flipped = init.clone();
    flipped.tick_ok = false;
    let f = project_now(&net, &flipped);
    assert_eq!(subsumes(&mut solver, &f, &u).unwrap(), SubsumeOutcome::NotSubsumed);
}

#[test]
fn different_nets_do_not_compare() {
    let Some(mut solver) = solver() else { return };
    let net = samples::producer_consumer().unwrap();
    let other = samples::forkjoin().unwrap();
    let u = project_now(&net, &SymState::initial(&net, false));
    let v = project_now(&other, &SymState::initial(&other, false));
    assert!(matches!(
        subsumes(&mut solver, &u, &v),
        Err(pitpn_fold::FoldError::NetMismatch(..))
    ));
}

/// Two visits to the initial marking along the loop denote the same
/// concrete states. The quantified projection detects that; the naive
/// unquantified implication over the raw constraints does not.
#[test]
fn revisited_markings_fold_where_naive_implication_fails() {
    let Some(mut solver) = solver() else { return };
    let net = producer_below_four();
    let goal = StatePredicate::MarkingEq(net.init_marking().clone());
    let opts = SymbolicSearchOptions {
        max_depth: Some(16),
        n_solutions: None,
        ..Default::default()
    };
    let result = smt_search(&net, &mut solver, &goal, &opts).unwrap();

    // Tick-eligible revisits of m0 denote the same region again, so the
    // projections subsume each other both ways.
    let revisits: Vec<_> = result
        .solutions
        .iter()
        .filter(|s| s.state.tick_ok && s.depth > 0)
        .collect();
    assert!(revisits.len() >= 2, "expected repeated visits to m0");
    let u = project_now(&net, &revisits[0].state);
    let v = project_now(&net, &revisits[1].state);
    assert_eq!(subsumes(&mut solver, &u, &v).unwrap(), SubsumeOutcome::Subsumed);
    assert_eq!(subsumes(&mut solver, &v, &u).unwrap(), SubsumeOutcome::Subsumed);

    // Mid-tick visits bind the producer clock to whichever duration
    // variable their own path introduced. The visit after a full loop
    // denotes a subset of the visit at depth one.
    let ticked: Vec<_> = result
        .solutions
        .iter()
        .filter(|s| !s.state.tick_ok && s.depth >= 1)
        .collect();
    let first = ticked[0];
    let second = ticked
        .iter()
        .copied()
        .find(|s| s.depth > first.depth)
        .expect("expected a mid-tick revisit after a full loop");
    let first = project_now(&net, &first.state);
    let second = project_now(&net, &second.state);
    assert_eq!(subsumes(&mut solver, &second, &first).unwrap(), SubsumeOutcome::Subsumed);

    // The same check without hiding the durations fails: each clock row
    // equates the canonical variable with its own path's tick variable,
    // and the consequent's variable floats freely.
    let (Formula::Exists(_, body_u), Formula::Exists(_, body_v)) =
        (&second.closure, &first.closure)
    else {
        panic!("projections of ticked states must quantify durations");
    };
    let naive = Formula::implies((**body_u).clone(), (**body_v).clone());
    assert_eq!(solver.check_valid(&naive).unwrap(), Validity::Invalid);
}

/// With folding, the search for states at the initial marking closes
/// its frontier after finitely many solutions.
#[test]
fn folded_revisit_search_terminates() {
    let Some(mut solver) = solver() else { return };
    let net = producer_below_four();
    let goal = StatePredicate::MarkingEq(net.init_marking().clone());
    let opts = FoldedSearchOptions { n_solutions: None, ..Default::default() };
    let folded = folded_search(&net, &mut solver, &goal, &opts).unwrap();

    assert!(folded.complete, "folding must exhaust the frontier");
    assert!(!folded.solutions.is_empty());
    assert!(folded.visited >= folded.solutions.len());

    // Every folded solution also exists unfolded at the same depth,
    // with the same marking and flag, and its witness is satisfiable.
    let max_depth = folded.solutions.iter().map(|s| s.depth).max().unwrap();
    let unfolded = smt_search(
        &net,
        &mut solver,
        &goal,
        &SymbolicSearchOptions {
            max_depth: Some(max_depth),
            n_solutions: None,
            ..Default::default()
        },
    )
    .unwrap();
    for sol in &folded.solutions {
        assert_eq!(solver.check_sat(&sol.witness).unwrap(), SatVerdict::Sat);
        assert!(
            unfolded.solutions.iter().any(|u| u.depth == sol.depth
                && u.state.tick_ok == sol.state.tick_ok
                && u.state.marking == sol.state.marking),
            "folded solution at depth {} missing from the unfolded search",
            sol.depth
        );
    }
}

/// Below a = 4 the producer/consumer stays 1-safe: the folded search
/// refutes reachability of an over-populated marking with a closed
/// frontier, which no depth-bounded unfolded search can certify.
#[test]
fn folded_safety_refutation_is_complete_below_four() {
    let Some(mut solver) = solver() else { return };
    let net = producer_below_four();
    let goal = StatePredicate::Not(Box::new(StatePredicate::KSafe(1)));
    let folded = folded_search(&net, &mut solver, &goal, &FoldedSearchOptions::default()).unwrap();
    assert!(folded.complete);
    assert!(folded.solutions.is_empty());
    assert_eq!(folded.stats.unknown_subsumptions, 0);
}

/// Exploration with an unreachable goal closes on nets whose symbolic
/// states fold finitely, regardless of search depth. The producer net
/// needs its safety bound `a < 4`; above it the marking itself grows
/// without bound and no finite frontier exists.
#[test]
fn exploration_closes_on_looping_models() {
    let Some(mut solver) = solver() else { return };
    for net in [producer_below_four(), samples::forkjoin().unwrap()] {
        let opts = FoldedSearchOptions {
            n_solutions: None,
            max_states: 2_000,
            ..Default::default()
        };
        let result = folded_search(&net, &mut solver, &StatePredicate::Bool(false), &opts)
            .unwrap_or_else(|e| panic!("{}: {e}", net.name));
        assert!(result.complete, "{} frontier not exhausted", net.name);
        assert!(result.solutions.is_empty());
        assert!(result.stats.subsumed > 0, "{} never folded a state", net.name);
    }
}

#[test]
fn goal_at_init_yields_one_solution_and_counts_visits() {
    let Some(mut solver) = solver() else { return };
    let net = producer_below_four();
    let result = folded_search(
        &net,
        &mut solver,
        &StatePredicate::Bool(true),
        &FoldedSearchOptions::default(),
    )
    .unwrap();
    assert_eq!(result.solutions.len(), 1);
    assert_eq!(result.solutions[0].depth, 0);
    assert!(result.visited >= 1);
}

/// The visited set rejects exactly the states some member covers.
#[test]
fn visited_set_retains_non_subsuming_members() {
    let Some(mut solver) = solver() else { return };
    let net = producer_below_four();
    let init = SymState::initial(&net, false);
    let mut narrowed = init.clone();
    narrowed.constraint = Formula::and2(
        narrowed.constraint.clone(),
        Formula::cmp(LinExpr::var(a()), Rel::Ge, LinExpr::from_int(2)),
    );

    let mut set = VisitedSet::new();
    assert_eq!(
        set.try_insert(&mut solver, project_now(&net, &init)).unwrap(),
        pitpn_fold::InsertOutcome::Inserted
    );
    assert_eq!(
        set.try_insert(&mut solver, project_now(&net, &narrowed)).unwrap(),
        pitpn_fold::InsertOutcome::SubsumedBy(0)
    );
    let mut flipped = init.clone();
    flipped.tick_ok = false;
    assert_eq!(
        set.try_insert(&mut solver, project_now(&net, &flipped)).unwrap(),
        pitpn_fold::InsertOutcome::Inserted
    );
    assert_eq!(set.len(), 2);
}

/// A point is one value per state variable and parameter.
fn restrict(vars: &[Var], model: &Model) -> Vec<(Var, Rat)> {
    vars.iter().map(|v| (v.clone(), model.value_or_zero(v))).collect()
}

fn point_formula(point: &[(Var, Rat)]) -> Formula {
    Formula::and_all(point.iter().map(|(v, r)| {
        Formula::cmp(LinExpr::var(v.clone()), Rel::Eq, LinExpr::constant(r.clone()))
    }))
}

/// Whether `point` lies in the concretization of `proj`.
fn member(solver: &mut Solver, proj: &ProjectedState, point: &[(Var, Rat)]) -> SatVerdict {
    let f = Formula::and2(proj.closure.clone(), point_formula(point));
    solver.check_sat(&f).unwrap()
}

/// Draws up to `n` distinct points from `proj`, blocking each one found.
fn sample_points(
    solver: &mut Solver,
    proj: &ProjectedState,
    vars: &[Var],
    n: usize,
) -> Vec<Vec<(Var, Rat)>> {
    let mut acc = proj.closure.clone();
    let mut out = Vec::new();
    while out.len() < n {
        let ModelOutcome::Sat(model) = solver.check_sat_model(&acc).unwrap() else { break };
        let point = restrict(vars, &model);
        acc = Formula::and2(acc, Formula::not_(point_formula(&point)));
        out.push(point);
    }
    out
}

/// Cross-checks subsumption verdicts against sampled concretizations:
/// points drawn from a covered state must lie inside the covering one,
/// and every same-flag refusal must exhibit a separating point that
/// plain membership queries confirm.
#[test]
fn subsumption_verdicts_agree_with_sampled_concretizations() {
    let Some(mut solver) = solver() else { return };
    for net in [samples::producer_consumer_fixed(3, 4).unwrap(), producer_below_four()] {
        let result = smt_search(
            &net,
            &mut solver,
            &StatePredicate::Bool(true),
            &SymbolicSearchOptions {
                max_depth: Some(3),
                n_solutions: None,
                ..Default::default()
            },
        )
        .unwrap();
        let projections: Vec<_> =
            result.solutions.iter().map(|s| project_now(&net, &s.state)).collect();
        assert!(projections.len() >= 4, "{}: too few states sampled", net.name);
        let vars: Vec<Var> = projections[0]
            .state_vars
            .iter()
            .cloned()
            .chain(net.param_vars())
            .collect();

        let mut covered = 0usize;
        let mut separated = 0usize;
        for u in &projections {
            for v in &projections {
                match subsumes(&mut solver, u, v).unwrap() {
                    SubsumeOutcome::Subsumed => {
                        covered += 1;
                        for point in sample_points(&mut solver, u, &vars, 3) {
                            assert_eq!(
                                member(&mut solver, v, &point),
                                SatVerdict::Sat,
                                "{}: sampled point escaped the covering state",
                                net.name
                            );
                        }
                    }
                    SubsumeOutcome::NotSubsumed if u.tick_ok == v.tick_ok => {
                        separated += 1;
                        let sep =
                            Formula::and2(u.closure.clone(), Formula::not_(v.closure.clone()));
                        let ModelOutcome::Sat(model) = solver.check_sat_model(&sep).unwrap()
                        else {
                            panic!("{}: no separating point despite refusal", net.name);
                        };
                        let point = restrict(&vars, &model);
                        assert_eq!(member(&mut solver, u, &point), SatVerdict::Sat);
                        assert_eq!(member(&mut solver, v, &point), SatVerdict::Unsat);
                    }
                    // A flag mismatch separates states regardless of the
                    // constraint geometry; there is nothing to sample.
                    SubsumeOutcome::NotSubsumed | SubsumeOutcome::Unknown => {}
                }
            }
        }
        assert!(covered >= projections.len(), "{}: diagonal must subsume", net.name);
        assert!(separated > 0, "{}: expected a separated same-flag pair", net.name);
    }
}
