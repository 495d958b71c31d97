//! Data model for parametric time Petri nets with inhibitor arcs.
//!
//! This crate defines the net structure (places, transitions with
//! pre/post/inhibitor arcs and parametric firing intervals), exact
//! rational arithmetic expressions, a first-order linear-arithmetic
//! formula AST, markings, parameter valuations, and the marking-level
//! predicates shared by the concrete and symbolic engines.

pub mod expr;
pub mod formula;
pub mod marking;
pub mod net;
pub mod ops;
pub mod pred;
pub mod rat;
pub mod samples;
pub mod validate;
pub mod valuation;

pub use expr::{LinExpr, Sort, Var};
pub use formula::{Formula, Rel, Term};
pub use marking::Marking;
pub use net::{Interval, Net, NetBuilder, ParamId, PlaceId, TimeBound, Transition, TransitionId};
pub use pred::StatePredicate;
pub use rat::{Int, Rat};
pub use validate::{Diagnostic, DiagnosticKind, SatOracle, SatVerdict};
pub use valuation::ParamValuation;

/// Errors raised by net construction and the marking-level operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("empty identifier")]
    EmptyId,
    #[error("identifier `{0}` uses the reserved `#` prefix")]
    ReservedId(String),
    #[error("parameter valuation is missing `{0}`")]
    MissingParam(String),
    #[error("value for marking parameter `{0}` must be a non-negative integer")]
    NotNatural(String),
    #[error("parameter valuation violates the initial constraint")]
    ConstraintViolated,
    #[error("expression is not constant: {0}")]
    NonConstant(String),
    #[error("cannot evaluate: variable `{0}` is unbound")]
    UnboundVar(String),
    #[error("cannot evaluate a quantified formula natively")]
    QuantifiedEval,
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("{0}")]
    Invalid(String),
}
