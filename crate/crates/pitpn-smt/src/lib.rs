//! SMT backend speaking SMT-LIB2 to an external solver process.
//!
//! The backend turns [`pitpn_core::Formula`] values into SMT-LIB2 text,
//! drives a solver over stdio with `:print-success` framing, and parses
//! satisfiability verdicts, models, and quantifier-elimination results
//! back into core types. Every query runs inside its own `push`/`pop`
//! scope so sessions stay reusable; a session that times out or answers
//! garbage is killed and respawned lazily on the next query.

pub mod parse;
pub mod printer;
pub mod session;
pub mod sexpr;
pub mod solver;

use thiserror::Error;

pub use parse::Model;
pub use session::{SolverConfig, SolverFamily};
pub use sexpr::Sexpr;
pub use solver::{ModelOutcome, Solver, SolverStats, Validity};

pub use pitpn_core::{SatOracle, SatVerdict};

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("no SMT solver found: pass a solver path, set PITPN_SOLVER, or put z3, cvc5, or yices-smt2 on PATH")]
    SolverNotFound,
    #[error("failed to launch {0}: {1}")]
    Launch(String, String),
    #[error("solver i/o failed: {0}")]
    Io(String),
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error("unexpected solver response: {0}")]
    Protocol(String),
    #[error("solver query timed out")]
    Timeout,
    #[error("{0}")]
    Unsupported(String),
    #[error("cannot parse solver output: {0}")]
    Parse(String),
    #[error("solver returned a model that does not satisfy the formula")]
    ModelUnsound,
}
