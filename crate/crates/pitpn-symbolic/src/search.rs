//! Breadth-first reachability over satisfiable symbolic states.

use std::collections::VecDeque;

use pitpn_core::formula::Formula;
use pitpn_core::net::Net;
use pitpn_core::pred::StatePredicate;
use pitpn_core::validate::SatVerdict;
use pitpn_smt::Solver;
use pitpn_strategy::Strategy;

use crate::engine::SymbolicEngine;
use crate::state::{SymEvent, SymState};
use crate::SymbolicError;

#[derive(Debug, Clone)]
pub struct SymbolicSearchOptions {
    /// Stop expanding below this edge depth; `None` explores freely.
    pub max_depth: Option<usize>,
    /// Abort once this many states have been enqueued.
    pub max_states: usize,
    /// Stop after this many goal states; `None` collects all in range.
    pub n_solutions: Option<usize>,
    /// Exploration strategy; `Strategy::all()` keeps every successor.
    pub strategy: Strategy,
    /// Track global time in every state. Forced on when the goal
    /// mentions total elapsed time.
    pub timed: bool,
}

impl Default for SymbolicSearchOptions {
    fn default() -> Self {
        SymbolicSearchOptions {
            max_depth: None,
            max_states: 100_000,
            n_solutions: Some(1),
            strategy: Strategy::all(),
            timed: false,
        }
    }
}

/// A goal state together with the constraint that witnesses it.
#[derive(Debug, Clone)]
pub struct Solution {
    pub state: SymState,
    /// State constraint conjoined with the instantiated goal; satisfiable.
    pub witness: Formula,
    pub depth: usize,
    /// Events from the initial state to `state`.
    pub path: Vec<SymEvent>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub explored: usize,
    pub enqueued: usize,
    pub depth_reached: usize,
}

#[derive(Debug, Clone)]
pub struct SmtSearchResult {
    pub solutions: Vec<Solution>,
    /// True when the frontier was exhausted, so an empty solution list
    /// refutes reachability. Budget cut-offs leave this false.
    pub complete: bool,
    pub stats: SearchStats,
}

/// Conjoins a state's constraint with the goal instantiated over its
/// symbolic entries.
pub fn witness_formula(
    net: &Net,
    goal: &StatePredicate,
    s: &SymState,
) -> Result<Formula, SymbolicError> {
    let f = goal.to_formula(
        net.places(),
        &|p| net.has_place(p).then(|| s.marking.get(p)),
        &|t| s.clocks.get(t).cloned(),
        s.global.as_ref(),
    )?;
    Ok(Formula::and2(s.constraint.clone(), f))
}

/// Whether the predicate constrains total elapsed time anywhere, in
/// which case searches must track the global clock.
pub fn mentions_global_time(p: &StatePredicate) -> bool {
    match p {
        StatePredicate::GlobalTime(..) => true,
        StatePredicate::Not(inner) => mentions_global_time(inner),
        StatePredicate::And(ps) | StatePredicate::Or(ps) => ps.iter().any(mentions_global_time),
        _ => false,
    }
}

/// Breadth-first search for states satisfying `goal`, pruning successors
/// whose constraints the solver refutes.
pub fn smt_search(
    net: &Net,
    solver: &mut Solver,
    goal: &StatePredicate,
    opts: &SymbolicSearchOptions,
) -> Result<SmtSearchResult, SymbolicError> {
    opts.strategy
        .validate(net)
        .map_err(|e| SymbolicError::Invalid(e.to_string()))?;
    let timed = opts.timed || mentions_global_time(goal);
    let mut engine = if timed { SymbolicEngine::timed(net) } else { SymbolicEngine::new(net) };

    let mut solutions = Vec::new();
    let mut stats = SearchStats::default();
    let mut truncated = false;
    let target = opts.n_solutions.unwrap_or(usize::MAX);

    let init = engine.init_state(solver)?;
    let mut queue: VecDeque<(SymState, usize, Vec<SymEvent>)> = VecDeque::new();
    queue.push_back((init, 0, Vec::new()));
    stats.enqueued = 1;

    'search: while let Some((state, depth, path)) = queue.pop_front() {
        stats.explored += 1;
        stats.depth_reached = stats.depth_reached.max(depth);

        let witness = witness_formula(net, goal, &state)?;
        if !matches!(witness, Formula::Bool(false)) {
            match solver.check_sat(&witness)? {
                SatVerdict::Sat => {
                    solutions.push(Solution { state: state.clone(), witness, depth, path: path.clone() });
                    if solutions.len() >= target {
                        truncated = true;
                        break 'search;
                    }
                }
                SatVerdict::Unsat => {}
                SatVerdict::Unknown => {
                    return Err(SymbolicError::Unknown(
                        "satisfiability of a goal witness".into(),
                    ))
                }
            }
        }

        if opts.max_depth.is_some_and(|d| depth >= d) {
            truncated = true;
            continue;
        }
        for (event, next) in engine.successors(solver, &state, &opts.strategy)? {
            if stats.enqueued >= opts.max_states {
                truncated = true;
                break 'search;
            }
            let mut next_path = path.clone();
            next_path.push(event);
            queue.push_back((next, depth + 1, next_path));
            stats.enqueued += 1;
        }
    }

    Ok(SmtSearchResult { solutions, complete: !truncated, stats })
}
