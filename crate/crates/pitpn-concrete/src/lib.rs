//! Explicit-state engine for fully instantiated nets: clock-based
//! execution with optional tick/fire alternation and global time,
//! time-sampled breadth-first search, LTL model checking over the
//! sampled graph, and an interval-semantics oracle used to cross-check
//! the clock semantics.

pub mod compiled;
pub mod ltl;
pub mod oracle;
pub mod search;
pub mod state;
pub mod step;

pub use compiled::{CompiledNet, CompiledTransition};
pub use ltl::{eval_lasso, model_check_ltl, Lasso, Ltl, LtlOutcome};
pub use oracle::{bisim_check, oracle_successors, BisimReport, IntervalState};
pub use search::{
    build_graph, check_ag, search_ef, AgOutcome, SampledGraph, SearchOptions, SearchOutcome,
    Trace,
};
pub use state::{ConcreteState, Mode};
pub use step::{fire, mte, sampled_successors, sampled_successors_filtered, tick, Event};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("net is parametric; instantiate it first")]
    Parametric,
    #[error("malformed net: {0}")]
    MalformedNet(String),
    #[error("step rejected: {0}")]
    StepRejected(#[from] step::StepError),
    #[error("predicate error: {0}")]
    Predicate(#[from] pitpn_core::CoreError),
    #[error("trace replay diverged at event {0}")]
    ReplayMismatch(usize),
    #[error("{0}")]
    Invalid(String),
}
