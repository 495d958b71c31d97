//! Symbolic tick and fire rules.

use pitpn_core::expr::{LinExpr, Var};
use pitpn_core::formula::{Formula, Rel, Term};
use pitpn_core::net::{Net, TimeBound, TransitionId};
use pitpn_core::ops;
use pitpn_core::validate::SatVerdict;
use pitpn_smt::Solver;
use pitpn_strategy::{StepOption, Strategy};

use crate::state::{FreshVars, SymEvent, SymState};
use crate::SymbolicError;

/// Applies the symbolic step rules of one net.
///
/// The engine owns the fresh-variable counter, so one engine drives
/// exactly one search; sharing it across searches would interleave
/// duration variables from unrelated paths.
pub struct SymbolicEngine<'n> {
    net: &'n Net,
    timed: bool,
    fresh: FreshVars,
}

impl<'n> SymbolicEngine<'n> {
    pub fn new(net: &'n Net) -> Self {
        SymbolicEngine { net, timed: false, fresh: FreshVars::new() }
    }

    /// Tracks total elapsed time in every state, for time-window goals.
    pub fn timed(net: &'n Net) -> Self {
        SymbolicEngine { net, timed: true, fresh: FreshVars::new() }
    }

    pub fn net(&self) -> &'n Net {
        self.net
    }

    pub fn fresh_issued(&self) -> u64 {
        self.fresh.issued()
    }

    /// Initial state: all clocks zero, constraint extended with interval
    /// well-formedness (`0 <= lo` and `lo <= hi`) and non-negativity of
    /// marking parameters and parametric token counts.
    pub fn init_state(&mut self, solver: &mut Solver) -> Result<SymState, SymbolicError> {
        let s = SymState::initial(self.net, self.timed);
        match solver.check_sat(&s.constraint)? {
            SatVerdict::Sat => Ok(s),
            SatVerdict::Unsat => Err(SymbolicError::UnsatInit),
            SatVerdict::Unknown => Err(SymbolicError::Unknown(
                "satisfiability of the initial constraint".into(),
            )),
        }
    }

    /// Upper bound on time elapse: for every transition with a finite
    /// interval, being active implies `clock + duration <= hi`.
    pub fn mte_predicate(&self, s: &SymState, duration: &Var) -> Formula {
        let dur = LinExpr::var(duration.clone());
        Formula::and_all(self.net.transitions().iter().filter_map(|t| {
            let hi = t.interval.hi.as_finite()?;
            let bound = Formula::atom(
                s.clock(&t.id).add_lin(&dur),
                Rel::Le,
                Term::Lin(hi.clone()),
            );
            Some(Formula::implies(ops::active(&s.marking, t), bound))
        }))
    }

    /// Lets time pass by a fresh non-negative duration bounded by the
    /// maximal time elapse. Returns the duration variable alongside the
    /// successor; `None` when ticking is out of turn or the extended
    /// constraint is unsatisfiable.
    pub fn sym_tick(
        &mut self,
        solver: &mut Solver,
        s: &SymState,
    ) -> Result<Option<(Var, SymState)>, SymbolicError> {
        if !s.tick_ok {
            return Ok(None);
        }
        let dur = self.fresh.tick();
        let dur_expr = LinExpr::var(dur.clone());
        let constraint = Formula::and_all([
            s.constraint.clone(),
            Formula::cmp(dur_expr.clone(), Rel::Ge, LinExpr::zero()),
            self.mte_predicate(s, &dur),
        ]);
        if matches!(constraint, Formula::Bool(false)) {
            return Ok(None);
        }
        let clocks = self
            .net
            .transitions()
            .iter()
            .map(|t| {
                let old = s.clock(&t.id);
                let advanced = old.add_lin(&dur_expr);
                (t.id.clone(), Term::ite(ops::active(&s.marking, t), advanced, old))
            })
            .collect();
        let next = SymState {
            tick_ok: false,
            marking: s.marking.clone(),
            clocks,
            global: s.global.as_ref().map(|g| g.add(&dur_expr)),
            constraint,
        };
        match solver.check_sat(&next.constraint)? {
            SatVerdict::Sat => Ok(Some((dur, next))),
            SatVerdict::Unsat => Ok(None),
            SatVerdict::Unknown => {
                Err(SymbolicError::Unknown("satisfiability of a tick successor".into()))
            }
        }
    }

    /// Fires `t`: the constraint gains activeness and interval membership
    /// of `t`'s clock, the fired clock resets, and every other clock keeps
    /// its value exactly when its transition stays enabled while `t`'s
    /// input tokens are removed.
    pub fn sym_fire(
        &mut self,
        solver: &mut Solver,
        s: &SymState,
        t: &TransitionId,
    ) -> Result<Option<SymState>, SymbolicError> {
        let tr = self.net.transition(t)?;
        let act = ops::active(&s.marking, tr);
        if matches!(act, Formula::Bool(false)) {
            return Ok(None);
        }
        let clock = s.clock(t);
        let mut cond = vec![
            s.constraint.clone(),
            act,
            Formula::atom(Term::Lin(tr.interval.lo.clone()), Rel::Le, clock.clone()),
        ];
        if let TimeBound::Finite(hi) = &tr.interval.hi {
            cond.push(Formula::atom(clock, Rel::Le, Term::Lin(hi.clone())));
        }
        let constraint = Formula::and_all(cond);
        if matches!(constraint, Formula::Bool(false)) {
            return Ok(None);
        }
        let intermediate = s.marking.sub(&tr.pre);
        let clocks = self
            .net
            .transitions()
            .iter()
            .map(|other| {
                let term = if other.id == tr.id {
                    Term::zero()
                } else {
                    Term::ite(ops::enabled(&intermediate, other), s.clock(&other.id), Term::zero())
                };
                (other.id.clone(), term)
            })
            .collect();
        let next = SymState {
            tick_ok: true,
            marking: ops::fire_marking(&s.marking, tr),
            clocks,
            global: s.global.clone(),
            constraint,
        };
        if next.constraint == s.constraint {
            return Ok(Some(next));
        }
        match solver.check_sat(&next.constraint)? {
            SatVerdict::Sat => Ok(Some(next)),
            SatVerdict::Unsat => Ok(None),
            SatVerdict::Unknown => {
                Err(SymbolicError::Unknown("satisfiability of a firing successor".into()))
            }
        }
    }

    /// All satisfiable successors, firings in declaration order followed
    /// by the tick, restricted by `strategy`.
    pub fn successors(
        &mut self,
        solver: &mut Solver,
        s: &SymState,
        strategy: &Strategy,
    ) -> Result<Vec<(SymEvent, SymState)>, SymbolicError> {
        let mut candidates = Vec::new();
        let mut computed: Vec<(StepOption, SymEvent, SymState)> = Vec::new();
        for t in self.net.transitions() {
            let opt = StepOption::Fire(t.id.clone());
            candidates.push(opt.clone());
            if let Some(next) = self.sym_fire(solver, s, &t.id)? {
                computed.push((opt, SymEvent::Fire(t.id.clone()), next));
            }
        }
        if s.tick_ok {
            candidates.push(StepOption::Tick);
            if let Some((dur, next)) = self.sym_tick(solver, s)? {
                computed.push((StepOption::Tick, SymEvent::Tick(dur), next));
            }
        }
        let kept = strategy.filter_successors(&candidates, |opt| {
            computed.iter().any(|(o, _, _)| o == opt)
        });
        Ok(computed
            .into_iter()
            .filter(|(o, _, _)| kept.contains(o))
            .map(|(_, ev, st)| (ev, st))
            .collect())
    }
}
