//! State folding for symbolic searches.
//!
//! A symbolic state is projected onto canonical "now" variables, one
//! per place and per transition clock, with everything else (tick
//! durations, past values) existentially hidden. A state whose
//! projection is entailed by an already-visited one denotes a subset
//! of concrete states and can be discarded, which turns unbounded
//! symbolic searches into terminating ones whenever the underlying
//! state-class structure is finite.

pub mod project;
pub mod search;
pub mod visited;

use thiserror::Error;

pub use project::{
    clock_var, global_var, marking_var, project_now, project_with_extra, subsumes,
    ProjectedState, SubsumeOutcome,
};
pub use search::{folded_search, FoldStats, FoldedSearchOptions, FoldedSearchResult};
pub use visited::{InsertOutcome, VisitedSet};

#[derive(Debug, Error)]
pub enum FoldError {
    #[error(transparent)]
    Core(#[from] pitpn_core::CoreError),
    #[error(transparent)]
    Smt(#[from] pitpn_smt::SmtError),
    #[error(transparent)]
    Symbolic(#[from] pitpn_symbolic::SymbolicError),
    #[error("cannot compare states of different nets (`{0}` vs `{1}`)")]
    NetMismatch(String, String),
}
