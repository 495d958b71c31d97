//! Shared option and result types for the synthesis procedures.

use std::collections::BTreeSet;

use pitpn_core::expr::Var;
use pitpn_core::formula::Formula;
use pitpn_core::net::Net;
use pitpn_strategy::Strategy;
use pitpn_symbolic::Solution;

/// Which search drives the synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Plain breadth-first symbolic search; needs a depth bound on nets
    /// with infinite symbolic graphs.
    Unfolded,
    /// Search with the subsumption visited-set; terminates whenever the
    /// state-class structure is finite.
    Folded,
}

/// The budget that stopped an early-terminated synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthBudget {
    Depth,
    States,
    Solutions,
    Iterations,
}

/// How much of the answer the returned constraint covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthStatus {
    /// The frontier was exhausted; the constraint is the whole answer.
    Exact,
    /// A budget cut the run short. For reachability the constraint
    /// covers the solutions found so far; for safety it still contains
    /// regions that later iterations would have excluded.
    Underapprox(SynthBudget),
    /// The solver gave up on some query; the constraint reflects only
    /// the queries that succeeded.
    Unknown,
}

/// Options shared by the synthesis procedures. Depth, state, and
/// solution budgets mirror the underlying search options; `max_iters`
/// caps the safety-synthesis exclusion loop.
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub mode: SearchMode,
    pub max_depth: Option<usize>,
    pub max_states: usize,
    /// Solutions collected per search; `None` takes every reachable one.
    pub n_solutions: Option<usize>,
    pub max_iters: usize,
    pub strategy: Strategy,
    pub timed: bool,
    /// Synthesis parameters beyond the net's own, e.g. fresh time-window
    /// endpoints. These survive projection.
    pub extra_params: BTreeSet<Var>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            mode: SearchMode::Folded,
            max_depth: None,
            max_states: 100_000,
            n_solutions: None,
            max_iters: 64,
            strategy: Strategy::all(),
            timed: false,
            extra_params: BTreeSet::new(),
        }
    }
}

impl SynthOptions {
    /// The projection targets: the net's parameters plus the extras.
    pub fn params(&self, net: &Net) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = net.param_vars().into_iter().collect();
        out.extend(self.extra_params.iter().cloned());
        out
    }
}

/// Outcome of a synthesis run.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    /// Region of parameter valuations answering the query; its free
    /// variables are parameters only.
    pub constraint: Formula,
    pub status: SynthStatus,
    /// Exclusion-loop rounds for safety synthesis; zero for plain
    /// reachability synthesis.
    pub iterations: usize,
    /// The goal states backing the constraint, with their paths.
    pub witnesses: Vec<Solution>,
}
