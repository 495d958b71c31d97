//! Symbolic semantics for parametric time Petri nets.
//!
//! States carry symbolic markings, if-then-else clock expressions, and
//! an accumulated satisfiable constraint. Time passes through a fresh
//! duration variable bounded by the maximal-time-elapse predicate;
//! firing accumulates interval-membership conditions. Searches are
//! breadth-first over satisfiable successors, with satisfiability
//! decided by an external SMT solver.

pub mod engine;
pub mod search;
pub mod state;

use thiserror::Error;

pub use engine::SymbolicEngine;
pub use search::{smt_search, SearchStats, SmtSearchResult, Solution, SymbolicSearchOptions};
pub use state::{FreshVars, SymEvent, SymState};

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error(transparent)]
    Core(#[from] pitpn_core::CoreError),
    #[error(transparent)]
    Smt(#[from] pitpn_smt::SmtError),
    #[error("the initial constraint is unsatisfiable")]
    UnsatInit,
    #[error("solver could not decide: {0}")]
    Unknown(String),
    #[error("{0}")]
    Invalid(String),
}
