//! Reachability synthesis: the parameter region from which some run
//! reaches a goal predicate, optionally within a global-time window.

use std::collections::BTreeSet;

use pitpn_core::expr::Var;
use pitpn_core::formula::Formula;
use pitpn_core::net::{Interval, Net, TimeBound};
use pitpn_core::pred::StatePredicate;
use pitpn_core::Rel;
use pitpn_fold::{folded_search, FoldedSearchOptions};
use pitpn_smt::{SmtError, Solver};
use pitpn_symbolic::{smt_search, Solution, SymbolicSearchOptions};

use crate::normal::normalize;
use crate::result::{SearchMode, SynthBudget, SynthOptions, SynthStatus, SynthesisResult};
use crate::SynthError;

/// Existentially hides every non-parameter variable of `witness` and
/// eliminates the quantifier, leaving a constraint over parameters.
pub fn project_to_params(
    solver: &mut Solver,
    witness: &Formula,
    params: &BTreeSet<Var>,
) -> Result<Formula, SynthError> {
    let hidden: Vec<Var> = witness
        .free_vars()
        .into_iter()
        .filter(|v| !params.contains(v))
        .collect();
    if hidden.is_empty() {
        return Ok(normalize(witness));
    }
    let region = solver.qe(&Formula::exists(hidden, witness.clone()))?;
    Ok(normalize(&region))
}

/// Goal states found by one search pass, with its completion flag.
pub(crate) struct SearchPass {
    pub solutions: Vec<Solution>,
    pub complete: bool,
}

pub(crate) fn run_search(
    net: &Net,
    solver: &mut Solver,
    goal: &StatePredicate,
    opts: &SynthOptions,
) -> Result<SearchPass, SynthError> {
    match opts.mode {
        SearchMode::Folded => {
            let fold_opts = FoldedSearchOptions {
                max_depth: opts.max_depth,
                max_states: opts.max_states,
                n_solutions: opts.n_solutions,
                strategy: opts.strategy.clone(),
                timed: opts.timed,
                ..Default::default()
            };
            let r = folded_search(net, solver, goal, &fold_opts)?;
            Ok(SearchPass { solutions: r.solutions, complete: r.complete })
        }
        SearchMode::Unfolded => {
            let sym_opts = SymbolicSearchOptions {
                max_depth: opts.max_depth,
                max_states: opts.max_states,
                n_solutions: opts.n_solutions,
                strategy: opts.strategy.clone(),
                timed: opts.timed,
            };
            let r = smt_search(net, solver, goal, &sym_opts)?;
            Ok(SearchPass { solutions: r.solutions, complete: r.complete })
        }
    }
}

/// Which budget to blame when a search stops before exhausting its
/// frontier.
pub(crate) fn stopped_by(opts: &SynthOptions, found: usize) -> SynthBudget {
    match opts.n_solutions {
        Some(cap) if found >= cap => SynthBudget::Solutions,
        _ if opts.max_depth.is_some() => SynthBudget::Depth,
        _ => SynthBudget::States,
    }
}

/// Computes the parameter region from which `pred` is reachable: the
/// union, over every goal state found, of its witness projected onto
/// the parameters. The region is exact when the search exhausted its
/// frontier; any budget leaves an under-approximation.
pub fn ef_synth(
    net: &Net,
    solver: &mut Solver,
    pred: &StatePredicate,
    opts: &SynthOptions,
) -> Result<SynthesisResult, SynthError> {
    let params = opts.params(net);
    let pass = run_search(net, solver, pred, opts)?;

    let mut regions = Vec::new();
    let mut gave_up = false;
    for sol in &pass.solutions {
        match project_to_params(solver, &sol.witness, &params) {
            Ok(region) => regions.push(region),
            // An undecided projection loses one region, not the run.
            Err(SynthError::Smt(SmtError::Timeout | SmtError::Unsupported(_))) => {
                gave_up = true;
            }
            Err(e) => return Err(e),
        }
    }

    let status = if gave_up {
        SynthStatus::Unknown
    } else if pass.complete {
        SynthStatus::Exact
    } else {
        SynthStatus::Underapprox(stopped_by(opts, pass.solutions.len()))
    };
    Ok(SynthesisResult {
        constraint: normalize(&Formula::or_all(regions)),
        status,
        iterations: 0,
        witnesses: pass.solutions,
    })
}

/// Reachability synthesis within a window on total elapsed time. The
/// window's endpoints may mention fresh variables; those become
/// synthesis parameters and survive projection, so the result relates
/// the net's parameters with the window's.
pub fn ef_timed(
    net: &Net,
    solver: &mut Solver,
    pred: &StatePredicate,
    window: &Interval,
    opts: &SynthOptions,
) -> Result<SynthesisResult, SynthError> {
    let mut goal = vec![
        pred.clone(),
        StatePredicate::GlobalTime(Rel::Ge, window.lo.clone()),
    ];
    if let TimeBound::Finite(hi) = &window.hi {
        goal.push(StatePredicate::GlobalTime(Rel::Le, hi.clone()));
    }

    let mut timed_opts = opts.clone();
    timed_opts.timed = true;
    let net_params: BTreeSet<Var> = net.param_vars().into_iter().collect();
    let mut endpoint_vars = BTreeSet::new();
    window.lo.collect_vars(&mut endpoint_vars);
    if let TimeBound::Finite(hi) = &window.hi {
        hi.collect_vars(&mut endpoint_vars);
    }
    timed_opts
        .extra_params
        .extend(endpoint_vars.into_iter().filter(|v| !net_params.contains(v)));

    ef_synth(net, solver, &StatePredicate::And(goal), &timed_opts)
}
