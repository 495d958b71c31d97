//! Marking-level predicates and net instantiation.
//!
//! These operations return formulas so that they work uniformly for
//! constant and parametric markings; on constant inputs they fold to
//! `true`/`false`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::expr::{LinExpr, Var};
use crate::formula::{Formula, Rel};
use crate::marking::Marking;
use crate::net::{Interval, Net, TimeBound, Transition, TransitionId};
use crate::valuation::ParamValuation;
use crate::CoreError;

/// `Pre(t) <= m`: every pre-arc place holds at least the arc weight.
pub fn enabled(m: &Marking, t: &Transition) -> Formula {
    Formula::and_all(
        t.pre
            .support()
            .map(|(p, w)| Formula::cmp(m.get(p), Rel::Ge, w.clone())),
    )
}

/// Some inhibitor place holds at least the arc weight.
pub fn inhibited(m: &Marking, t: &Transition) -> Formula {
    Formula::or_all(t.inhibit.support().filter_map(|(p, w)| {
        if w.as_constant().is_some_and(|c| c.is_zero()) {
            None
        } else {
            Some(Formula::cmp(m.get(p), Rel::Ge, w.clone()))
        }
    }))
}

/// Enabled and not inhibited.
pub fn active(m: &Marking, t: &Transition) -> Formula {
    Formula::and2(enabled(m, t), Formula::not_(inhibited(m, t)))
}

/// `t` is newly enabled after firing `tf` from `m`:
/// enabled in the successor, and either `t = tf` or not enabled in the
/// intermediate marking `m - Pre(tf)`.
pub fn newly_enabled(t: &Transition, m: &Marking, tf: &Transition) -> Formula {
    let successor = m.sub(&tf.pre).add(&tf.post);
    let intermediate = m.sub(&tf.pre);
    let enabled_after = enabled(&successor, t);
    if t.id == tf.id {
        enabled_after
    } else {
        Formula::and2(enabled_after, Formula::not_(enabled(&intermediate, t)))
    }
}

/// Successor marking `m - Pre(tf) + Post(tf)`.
pub fn fire_marking(m: &Marking, tf: &Transition) -> Marking {
    m.sub(&tf.pre).add(&tf.post)
}

/// Every place of `m` holds at most `k` tokens. Places absent from the
/// support hold 0 and are trivially within bound.
pub fn k_safe(k: u64, m: &Marking) -> Formula {
    Formula::and_all(
        m.support()
            .map(|(_, e)| Formula::cmp(e.clone(), Rel::Le, LinExpr::from_int(k as i64))),
    )
}

impl Net {
    pub fn enabled(&self, m: &Marking, t: &TransitionId) -> Result<Formula, CoreError> {
        Ok(enabled(m, self.transition(t)?))
    }

    pub fn inhibited(&self, m: &Marking, t: &TransitionId) -> Result<Formula, CoreError> {
        Ok(inhibited(m, self.transition(t)?))
    }

    pub fn active(&self, m: &Marking, t: &TransitionId) -> Result<Formula, CoreError> {
        Ok(active(m, self.transition(t)?))
    }

    pub fn newly_enabled(
        &self,
        t: &TransitionId,
        m: &Marking,
        tf: &TransitionId,
    ) -> Result<Formula, CoreError> {
        Ok(newly_enabled(self.transition(t)?, m, self.transition(tf)?))
    }

    pub fn fire_marking(&self, m: &Marking, tf: &TransitionId) -> Result<Marking, CoreError> {
        Ok(fire_marking(m, self.transition(tf)?))
    }

    /// Substitutes a total parameter valuation through the net; the result
    /// has no parameters and constant intervals, markings and constraint.
    pub fn instantiate(&self, v: &ParamValuation) -> Result<Net, CoreError> {
        v.check_against(self)?;
        let map = v.subst_map();
        let mut b = Net::builder(self.name.clone());
        for p in self.places() {
            b = b.place(p.clone());
        }
        for t in self.transitions() {
            let interval = Interval {
                lo: t.interval.lo.subst(&map),
                hi: match &t.interval.hi {
                    TimeBound::Finite(e) => TimeBound::Finite(e.subst(&map)),
                    TimeBound::Infinite => TimeBound::Infinite,
                },
            };
            let mut nt = Transition::new(t.id.clone(), interval);
            nt.pre = t.pre.clone();
            nt.post = t.post.clone();
            nt.inhibit = t.inhibit.clone();
            b = b.transition(nt);
        }
        let net = b.constraint(self.init_constraint().subst(&map)).build()?;
        net.with_init_marking(self.init_marking().subst(&map))
    }
}

/// Substitution map sending each parameter variable to its value.
impl ParamValuation {
    pub(crate) fn subst_map(&self) -> BTreeMap<Var, LinExpr> {
        self.entries()
            .map(|(v, r)| (v.clone(), LinExpr::constant(r.clone())))
            .collect()
    }
}
