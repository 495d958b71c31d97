//! Now-projection of symbolic states and the subsumption relation.

use std::collections::BTreeSet;

use pitpn_core::expr::{LinExpr, Var};
use pitpn_core::formula::{Formula, Rel, Term};
use pitpn_core::marking::Marking;
use pitpn_core::net::{Net, PlaceId, TransitionId};
use pitpn_smt::{Solver, Validity};
use pitpn_symbolic::SymState;

use crate::FoldError;

/// Canonical variable holding the current token count of `p`.
pub fn marking_var(p: &PlaceId) -> Var {
    Var::int(format!("#m-{}", p.name()))
}

/// Canonical variable holding the current clock of `t`.
pub fn clock_var(t: &TransitionId) -> Var {
    Var::real(format!("#c-{}", t.name()))
}

/// Canonical variable holding the total elapsed time.
pub fn global_var() -> Var {
    Var::real("#g")
}

/// A symbolic state reduced to its observable "now": canonical state
/// variables for every place and clock, parameters, and an existential
/// closure hiding the tick variables that produced them.
///
/// Two projections of same-net states share variable names, so the
/// renaming between them is the identity and subsumption reduces to an
/// implication check.
#[derive(Debug, Clone)]
pub struct ProjectedState {
    pub net_name: String,
    pub tick_ok: bool,
    /// Whether the state tracks global time; only like states compare.
    pub timed: bool,
    /// Extra partition label for augmented states; empty for plain ones.
    pub tag: String,
    /// Canonical state variables, in a fixed per-net order.
    pub state_vars: Vec<Var>,
    /// `exists hidden. constraint and (state vars = expressions)`;
    /// free variables are the state variables and the net parameters.
    pub closure: Formula,
    /// Marking snapshot backing the syntactic pre-filter.
    pub marking: Marking,
}

impl ProjectedState {
    /// Constant token counts, when the whole marking is ground.
    pub fn ground_marking(&self) -> Option<std::collections::BTreeMap<PlaceId, pitpn_core::rat::Int>> {
        self.marking.as_constant()
    }
}

/// Projects `s` onto its canonical now-variables.
pub fn project_now(net: &Net, s: &SymState) -> ProjectedState {
    project_with_extra(net, s, "", &[])
}

/// Projection with extra canonical components, used by augmented state
/// spaces (e.g. a response clock). Each pair binds a caller-chosen
/// canonical variable to an expression of the state; `tag` partitions
/// states that must never compare (e.g. clock running vs. stopped).
pub fn project_with_extra(
    net: &Net,
    s: &SymState,
    tag: &str,
    extra: &[(Var, Term)],
) -> ProjectedState {
    let mut state_vars = Vec::new();
    let mut equalities = Vec::new();

    for p in net.places() {
        let v = marking_var(p);
        equalities.push(Formula::cmp(LinExpr::var(v.clone()), Rel::Eq, s.marking.get(p)));
        state_vars.push(v);
    }
    for t in net.transitions() {
        let v = clock_var(&t.id);
        equalities.push(Formula::atom(
            Term::Lin(LinExpr::var(v.clone())),
            Rel::Eq,
            s.clock(&t.id),
        ));
        state_vars.push(v);
    }
    if let Some(g) = &s.global {
        let v = global_var();
        equalities.push(Formula::cmp(LinExpr::var(v.clone()), Rel::Eq, g.clone()));
        state_vars.push(v);
    }
    for (v, e) in extra {
        equalities.push(Formula::atom(Term::Lin(LinExpr::var(v.clone())), Rel::Eq, e.clone()));
        state_vars.push(v.clone());
    }

    let body = Formula::and_all(std::iter::once(s.constraint.clone()).chain(equalities));
    let keep: BTreeSet<Var> = state_vars.iter().cloned().chain(net.param_vars()).collect();
    let hidden: Vec<Var> = body.free_vars().into_iter().filter(|v| !keep.contains(v)).collect();

    ProjectedState {
        net_name: net.name.clone(),
        tick_ok: s.tick_ok,
        timed: s.global.is_some(),
        tag: tag.to_string(),
        state_vars,
        closure: Formula::exists(hidden, body),
        marking: s.marking.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsumeOutcome {
    Subsumed,
    NotSubsumed,
    /// The solver gave up; callers must treat this as not subsumed.
    Unknown,
}

/// Whether every concrete state denoted by `u` is also denoted by `v`,
/// decided as validity of `closure(u) => closure(v)`. States with
/// different flags or partition tags never subsume each other.
pub fn subsumes(
    solver: &mut Solver,
    u: &ProjectedState,
    v: &ProjectedState,
) -> Result<SubsumeOutcome, FoldError> {
    if u.net_name != v.net_name || u.state_vars != v.state_vars {
        return Err(FoldError::NetMismatch(u.net_name.clone(), v.net_name.clone()));
    }
    if u.tick_ok != v.tick_ok || u.timed != v.timed || u.tag != v.tag {
        return Ok(SubsumeOutcome::NotSubsumed);
    }
    if let (Some(mu), Some(mv)) = (u.ground_marking(), v.ground_marking()) {
        if mu != mv {
            return Ok(SubsumeOutcome::NotSubsumed);
        }
    }
    let implication = Formula::implies(u.closure.clone(), v.closure.clone());
    match solver.check_valid(&implication)? {
        Validity::Valid => Ok(SubsumeOutcome::Subsumed),
        Validity::Invalid => Ok(SubsumeOutcome::NotSubsumed),
        Validity::Unknown => Ok(SubsumeOutcome::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pitpn_core::samples;

    #[test]
    fn projection_keeps_only_state_vars_and_parameters() {
        let net = samples::producer_consumer().unwrap();
        let s = SymState::initial(&net, false);
        let p = project_now(&net, &s);
        assert_eq!(p.state_vars.len(), net.places().len() + net.transitions().len());
        let params: BTreeSet<Var> = net.param_vars().into_iter().collect();
        for v in p.closure.free_vars() {
            assert!(
                p.state_vars.contains(&v) || params.contains(&v),
                "leaked variable {}",
                v.name
            );
        }
    }

    #[test]
    fn timed_projection_adds_the_global_variable() {
        let net = samples::producer_consumer().unwrap();
        let s = SymState::initial(&net, true);
        let p = project_with_extra(&net, &s, "running", &[]);
        assert!(p.timed);
        assert_eq!(p.tag, "running");
        assert!(p.state_vars.contains(&global_var()));
    }
}
