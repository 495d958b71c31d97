//! Symbolic states and fresh-variable generation.

use std::collections::BTreeMap;
use std::fmt;

use pitpn_core::expr::{LinExpr, Var};
use pitpn_core::formula::{Formula, Term};
use pitpn_core::marking::Marking;
use pitpn_core::net::{Net, TransitionId};

/// Generator for duration variables introduced by symbolic ticks.
///
/// Generated names start with `#`, which the net builder rejects for
/// user identifiers, so they can never collide with model symbols.
#[derive(Debug, Default, Clone)]
pub struct FreshVars {
    counter: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        Self::default()
    }

    /// Next tick-duration variable, real sorted.
    pub fn tick(&mut self) -> Var {
        let v = Var::real(format!("#t-{}", self.counter));
        self.counter += 1;
        v
    }

    /// Number of variables handed out so far.
    pub fn issued(&self) -> u64 {
        self.counter
    }
}

/// One edge of a symbolic run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymEvent {
    /// Time elapsed by the amount bound to this duration variable.
    Tick(Var),
    Fire(TransitionId),
}

impl fmt::Display for SymEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymEvent::Tick(v) => write!(f, "tick({})", v.name),
            SymEvent::Fire(t) => write!(f, "fire({t})"),
        }
    }
}

/// A symbolic state of the net.
///
/// Invariant: `constraint` is satisfiable; every construction site
/// discards candidates whose constraint the solver refutes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymState {
    /// Whether a tick may happen next; ticks and firings alternate.
    pub tick_ok: bool,
    /// Token counts, linear in the marking parameters.
    pub marking: Marking,
    /// Clock expression per transition, over tick-duration variables.
    pub clocks: BTreeMap<TransitionId, Term>,
    /// Total elapsed time, tracked only for timed queries.
    pub global: Option<LinExpr>,
    /// Conjunction of all constraints accumulated along the path.
    pub constraint: Formula,
}

impl SymState {
    /// Initial symbolic state of `net`: clocks at zero, constraint
    /// extended with interval well-formedness and non-negativity of
    /// marking parameters. Satisfiability is not checked here; use
    /// [`crate::SymbolicEngine::init_state`] for the checked variant.
    pub fn initial(net: &Net, timed: bool) -> SymState {
        use pitpn_core::formula::Rel;

        let mut wf = vec![net.init_constraint().clone()];
        for t in net.transitions() {
            let lo = t.interval.lo.clone();
            wf.push(Formula::cmp(LinExpr::zero(), Rel::Le, lo.clone()));
            if let pitpn_core::net::TimeBound::Finite(hi) = &t.interval.hi {
                wf.push(Formula::cmp(lo, Rel::Le, hi.clone()));
            }
        }
        for v in net.param_vars() {
            if v.sort == pitpn_core::expr::Sort::Int {
                wf.push(Formula::cmp(LinExpr::var(v.clone()), Rel::Ge, LinExpr::zero()));
            }
        }
        let marking = net.init_marking().clone();
        for (_, e) in marking.support() {
            if !e.is_constant() {
                wf.push(Formula::cmp(e.clone(), Rel::Ge, LinExpr::zero()));
            }
        }
        let clocks = net
            .transitions()
            .iter()
            .map(|t| (t.id.clone(), Term::Lin(LinExpr::zero())))
            .collect();
        SymState {
            tick_ok: true,
            marking,
            clocks,
            global: timed.then(LinExpr::zero),
            constraint: Formula::and_all(wf),
        }
    }

    /// Clock expression of `t`; transitions all start at zero.
    pub fn clock(&self, t: &TransitionId) -> Term {
        self.clocks
            .get(t)
            .cloned()
            .unwrap_or_else(|| Term::Lin(LinExpr::zero()))
    }

    /// Variables mentioned anywhere in the state.
    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut out = self.constraint.free_vars();
        for (_, e) in self.marking.support() {
            e.collect_vars(&mut out);
        }
        for term in self.clocks.values() {
            collect_term_vars(term, &mut out);
        }
        if let Some(g) = &self.global {
            g.collect_vars(&mut out);
        }
        out
    }

    /// Token-count expression for `p`, used when building goal formulas.
    pub fn tokens(&self, p: &pitpn_core::net::PlaceId) -> LinExpr {
        self.marking.get(p)
    }

    /// True when every token count is a plain number.
    pub fn marking_is_ground(&self) -> bool {
        self.marking.is_constant()
    }
}

fn collect_term_vars(term: &Term, out: &mut std::collections::BTreeSet<Var>) {
    match term {
        Term::Lin(e) => e.collect_vars(out),
        Term::Ite(c, a, b) => {
            out.extend(c.free_vars());
            collect_term_vars(a, out);
            collect_term_vars(b, out);
        }
    }
}

impl fmt::Display for SymState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = if self.tick_ok { "tick-ok" } else { "fired" };
        write!(f, "[{flag}] {}", self.marking)?;
        let mut first = true;
        write!(f, " clocks{{")?;
        for (t, c) in &self.clocks {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{t}: {c}")?;
        }
        write!(f, "}}")?;
        if let Some(g) = &self.global {
            write!(f, " time={g}")?;
        }
        write!(f, " | {}", self.constraint)
    }
}

