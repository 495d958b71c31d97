//! Breadth-first symbolic search with a folding visited set.

use std::collections::VecDeque;

use pitpn_core::formula::Formula;
use pitpn_core::net::Net;
use pitpn_core::pred::StatePredicate;
use pitpn_core::validate::SatVerdict;
use pitpn_smt::Solver;
use pitpn_strategy::Strategy;
use pitpn_symbolic::search::{mentions_global_time, witness_formula};
use pitpn_symbolic::{Solution, SymEvent, SymState, SymbolicEngine, SymbolicError};

use crate::project::project_now;
use crate::visited::{InsertOutcome, VisitedSet};
use crate::FoldError;

#[derive(Debug, Clone)]
pub struct FoldedSearchOptions {
    /// Stop expanding below this edge depth; `None` relies on folding
    /// for termination.
    pub max_depth: Option<usize>,
    /// Abort once this many states have been inserted.
    pub max_states: usize,
    /// Stop after this many goal states; `None` collects all.
    pub n_solutions: Option<usize>,
    pub strategy: Strategy,
    pub timed: bool,
    /// Order in which visited members are tried as subsumers.
    pub newest_first: bool,
}

impl Default for FoldedSearchOptions {
    fn default() -> Self {
        FoldedSearchOptions {
            max_depth: None,
            max_states: 100_000,
            n_solutions: Some(1),
            strategy: Strategy::all(),
            timed: false,
            newest_first: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FoldStats {
    pub explored: usize,
    pub enqueued: usize,
    /// Successors discarded because a visited state covers them.
    pub subsumed: usize,
    /// Subsumption queries the solver could not decide.
    pub unknown_subsumptions: u64,
    pub depth_reached: usize,
}

#[derive(Debug, Clone)]
pub struct FoldedSearchResult {
    pub solutions: Vec<Solution>,
    /// Number of pairwise non-subsuming states retained.
    pub visited: usize,
    /// True when the frontier was exhausted: an empty solution list
    /// then refutes reachability over all runs, of any length.
    pub complete: bool,
    pub stats: FoldStats,
}

/// Breadth-first search like the unfolded one, except that a successor
/// subsumed by any visited state is pruned. On nets whose symbolic
/// state space folds into finitely many classes this terminates even
/// without depth bounds.
pub fn folded_search(
    net: &Net,
    solver: &mut Solver,
    goal: &StatePredicate,
    opts: &FoldedSearchOptions,
) -> Result<FoldedSearchResult, FoldError> {
    opts.strategy
        .validate(net)
        .map_err(|e| FoldError::Symbolic(SymbolicError::Invalid(e.to_string())))?;
    let timed = opts.timed || mentions_global_time(goal);
    let mut engine = if timed { SymbolicEngine::timed(net) } else { SymbolicEngine::new(net) };

    let mut visited = if opts.newest_first { VisitedSet::new() } else { VisitedSet::oldest_first() };
    let mut solutions = Vec::new();
    let mut stats = FoldStats::default();
    let mut truncated = false;
    let target = opts.n_solutions.unwrap_or(usize::MAX);

    let init = engine.init_state(solver).map_err(FoldError::Symbolic)?;
    let mut queue: VecDeque<(SymState, usize, Vec<SymEvent>)> = VecDeque::new();
    visited.try_insert(solver, project_now(net, &init))?;
    queue.push_back((init, 0, Vec::new()));
    stats.enqueued = 1;

    'search: while let Some((state, depth, path)) = queue.pop_front() {
        stats.explored += 1;
        stats.depth_reached = stats.depth_reached.max(depth);

        let witness = witness_formula(net, goal, &state).map_err(FoldError::Symbolic)?;
        if !matches!(witness, Formula::Bool(false)) {
            match solver.check_sat(&witness).map_err(FoldError::Smt)? {
                SatVerdict::Sat => {
                    solutions.push(Solution {
                        state: state.clone(),
                        witness,
                        depth,
                        path: path.clone(),
                    });
                    if solutions.len() >= target {
                        truncated = true;
                        break 'search;
                    }
                }
                SatVerdict::Unsat => {}
                SatVerdict::Unknown => {
                    return Err(FoldError::Symbolic(SymbolicError::Unknown(
                        "satisfiability of a goal witness".into(),
                    )))
                }
            }
        }

        if opts.max_depth.is_some_and(|d| depth >= d) {
            truncated = true;
            continue;
        }
        for (event, next) in engine
            .successors(solver, &state, &opts.strategy)
            .map_err(FoldError::Symbolic)?
        {
            if visited.len() >= opts.max_states {
                truncated = true;
                break 'search;
            }
            match visited.try_insert(solver, project_now(net, &next))? {
                InsertOutcome::SubsumedBy(_) => {
                    stats.subsumed += 1;
                }
                InsertOutcome::Inserted => {
                    let mut next_path = path.clone();
                    next_path.push(event);
                    queue.push_back((next, depth + 1, next_path));
                    stats.enqueued += 1;
                }
            }
        }
    }

    stats.unknown_subsumptions = visited.unknowns;
    Ok(FoldedSearchResult {
        solutions,
        visited: visited.len(),
        complete: !truncated,
        stats,
    })
}
