//! Single-step semantics: maximal time elapse, tick, fire, and the
//! time-sampled successor relation used by the searches.

use std::fmt;

use num_traits::{Signed, Zero};
use pitpn_core::{Rat, TransitionId};
use pitpn_strategy::{StepOption, Strategy};
use thiserror::Error;

use crate::compiled::CompiledNet;
use crate::state::ConcreteState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("tick duration {0} exceeds the maximal time elapse {1}")]
    BeyondMte(String, String),
    #[error("tick duration is negative")]
    NegativeDelta,
    #[error("tick not allowed: the previous step was already a tick")]
    AlternationBlocked,
    #[error("transition `{0}` is not firable in this state")]
    NotFirable(TransitionId),
    #[error("unknown transition index {0}")]
    UnknownTransition(usize),
}

/// One step of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Event {
    Tick(Rat),
    Fire(TransitionId),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Tick(d) => write!(f, "tick({})", pitpn_core::rat::display(d)),
            Event::Fire(t) => write!(f, "fire({t})"),
        }
    }
}

/// Maximal time elapse: the tightest remaining deadline among active
/// transitions with a finite latest firing time. `None` means time may
/// advance without bound.
pub fn mte(net: &CompiledNet, s: &ConcreteState) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for (ti, t) in net.transitions.iter().enumerate() {
        if let Some(hi) = &t.hi {
            if net.active(&s.marking, ti) {
                let slack = hi - &s.clocks[ti];
                if best.as_ref().is_none_or(|b| slack < *b) {
                    best = Some(slack);
                }
            }
        }
    }
    best
}

/// Advances time by `delta`: clocks of active transitions grow, others
/// stay put. Requires `delta <= mte` and, in alternating mode, the tick
/// flag to be up.
pub fn tick(net: &CompiledNet, s: &ConcreteState, delta: &Rat) -> Result<ConcreteState, StepError> {
    if delta.is_negative() {
        return Err(StepError::NegativeDelta);
    }
    if s.tick_ok == Some(false) {
        return Err(StepError::AlternationBlocked);
    }
    if let Some(bound) = mte(net, s) {
        if *delta > bound {
            return Err(StepError::BeyondMte(
                pitpn_core::rat::display(delta),
                pitpn_core::rat::display(&bound),
            ));
        }
    }
    let mut clocks = s.clocks.clone();
    for (ti, c) in clocks.iter_mut().enumerate() {
        if net.active(&s.marking, ti) {
            *c += delta;
        }
    }
    let out = ConcreteState {
        tick_ok: s.tick_ok.map(|_| false),
        marking: s.marking.clone(),
        clocks,
        global: s.global.as_ref().map(|gt| gt + delta),
    };
    out.assert_invariant(net);
    Ok(out)
}

pub fn can_fire(net: &CompiledNet, s: &ConcreteState, ti: usize) -> bool {
    if ti >= net.transitions.len() || !net.active(&s.marking, ti) {
        return false;
    }
    let t = &net.transitions[ti];
    let c = &s.clocks[ti];
    *c >= t.lo && t.hi.as_ref().is_none_or(|hi| c <= hi)
}

/// Fires transition `ti`: tokens move, the fired clock resets, and any
/// transition no longer enabled in the intermediate marking loses its
/// clock. Firing re-arms the tick flag.
pub fn fire(net: &CompiledNet, s: &ConcreteState, ti: usize) -> Result<ConcreteState, StepError> {
    let t = net
        .transitions
        .get(ti)
        .ok_or(StepError::UnknownTransition(ti))?;
    if !can_fire(net, s, ti) {
        return Err(StepError::NotFirable(t.id.clone()));
    }
    let intermediate = net.intermediate_marking(&s.marking, ti);
    let mut clocks = s.clocks.clone();
    for (tj, c) in clocks.iter_mut().enumerate() {
        if tj == ti || !net.enabled(&intermediate, tj) {
            *c = Rat::zero();
        }
    }
    let mut marking = intermediate;
    for &(p, w) in &net.transitions[ti].post {
        marking[p] += w;
    }
    let out = ConcreteState {
        tick_ok: s.tick_ok.map(|_| true),
        marking,
        clocks,
        global: s.global.clone(),
    };
    out.assert_invariant(net);
    Ok(out)
}

/// All fire successors (in transition declaration order) plus the
/// single `tick(step)` successor when legal.
pub fn sampled_successors(
    net: &CompiledNet,
    s: &ConcreteState,
    step: &Rat,
) -> Vec<(Event, ConcreteState)> {
    sampled_successors_filtered(net, s, step, &Strategy::all())
}

/// Sampled successors restricted by a strategy. The strategy sees one
/// fire option per transition plus the tick option; applicability of a
/// fire is firability, of the tick legality of `tick(step)`.
pub fn sampled_successors_filtered(
    net: &CompiledNet,
    s: &ConcreteState,
    step: &Rat,
    strategy: &Strategy,
) -> Vec<(Event, ConcreteState)> {
    let mut candidates: Vec<StepOption> = net
        .transitions
        .iter()
        .map(|t| StepOption::Fire(t.id.clone()))
        .collect();
    candidates.push(StepOption::Tick);

    let tick_allowed = s.tick_ok != Some(false)
        && mte(net, s).as_ref().is_none_or(|bound| step <= bound);
    let chosen = strategy.filter_successors(&candidates, |opt| match opt {
        StepOption::Fire(id) => net
            .transition_index(id)
            .map(|ti| can_fire(net, s, ti))
            .unwrap_or(false),
        StepOption::Tick => tick_allowed,
    });

    let mut out = Vec::new();
    for opt in chosen {
        match opt {
            StepOption::Fire(id) => {
                if let Some(ti) = net.transition_index(&id) {
                    if can_fire(net, s, ti) {
                        let next = fire(net, s, ti).expect("guarded by can_fire");
                        out.push((Event::Fire(id), next));
                    }
                }
            }
            StepOption::Tick => {
                if tick_allowed {
                    let next = tick(net, s, step).expect("guarded by tick_allowed");
                    out.push((Event::Tick(step.clone()), next));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Mode;
    use pitpn_core::rat::rat;
    use pitpn_core::samples;

    fn net34() -> CompiledNet {
        CompiledNet::compile(&samples::producer_consumer_fixed(3, 4).unwrap()).unwrap()
    }

    #[test]
    fn mte_takes_tightest_active_deadline() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::plain());
        // Only t1 is active initially; its deadline is 6.
        assert_eq!(mte(&net, &s), Some(rat(6)));
    }

    #[test]
    fn mte_is_zero_at_the_deadline() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::plain());
        let s = tick(&net, &s, &rat(6)).unwrap();
        assert_eq!(mte(&net, &s), Some(rat(0)));
        assert!(tick(&net, &s, &rat(1)).is_err());
    }

    #[test]
    fn tick_moves_only_active_clocks() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::plain());
        let s = tick(&net, &s, &rat(2)).unwrap();
        let t1 = net.transition_index(&"t1".into()).unwrap();
        for (ti, c) in s.clocks.iter().enumerate() {
            assert_eq!(*c, if ti == t1 { rat(2) } else { rat(0) });
        }
    }

    #[test]
    fn inhibited_clock_freezes() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let s = ConcreteState::initial(&net, Mode::plain());
        let s = tick(&net, &s, &rat(2)).unwrap();
        let t2 = net.transition_index(&"t2".into()).unwrap();
        let t3 = net.transition_index(&"t3".into()).unwrap();
        // t2 is enabled but inhibited by A, so its clock stays at 0.
        assert_eq!(s.clocks[t2], rat(0));
        assert_eq!(s.clocks[t3], rat(2));
    }

    #[test]
    fn fire_resets_and_updates() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::plain());
        let s = tick(&net, &s, &rat(2)).unwrap();
        let t1 = net.transition_index(&"t1".into()).unwrap();
        let s = fire(&net, &s, t1).unwrap();
        let p1 = net.place_index(&"p1".into()).unwrap();
        let p4 = net.place_index(&"p4".into()).unwrap();
        assert_eq!(s.marking[p1], 1);
        assert_eq!(s.marking[p4], 1);
        assert!(s.clocks.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn fire_respects_interval_membership() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let t1 = net.transition_index(&"t1".into()).unwrap();
        let t3 = net.transition_index(&"t3".into()).unwrap();
        // t3's deadline caps the first elapse at 2, so clear it first.
        let s = ConcreteState::initial(&net, Mode::plain());
        let s = tick(&net, &s, &rat(1)).unwrap();
        let s = fire(&net, &s, t3).unwrap();
        let early = tick(&net, &s, &rat(3)).unwrap();
        assert_eq!(early.clocks[t1], rat(4));
        assert!(fire(&net, &early, t1).is_err());
        let ready = tick(&net, &early, &rat(1)).unwrap();
        assert!(fire(&net, &ready, t1).is_ok());
    }

    #[test]
    fn alternation_blocks_consecutive_ticks() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::alternating());
        let s = tick(&net, &s, &rat(1)).unwrap();
        assert_eq!(tick(&net, &s, &rat(1)), Err(StepError::AlternationBlocked));
    }

    #[test]
    fn global_time_accumulates() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::timed());
        let s = tick(&net, &s, &rat(2)).unwrap();
        let t1 = net.transition_index(&"t1".into()).unwrap();
        let s = fire(&net, &s, t1).unwrap();
        let s = tick(&net, &s, &rat(3)).unwrap();
        assert_eq!(s.global, Some(rat(5)));
    }

    #[test]
    fn sampled_successors_shape() {
        let net = net34();
        let s = ConcreteState::initial(&net, Mode::plain());
        let succ = sampled_successors(&net, &s, &rat(1));
        // Nothing is firable at clock 0 with lower bound 2: only the tick.
        assert_eq!(succ.len(), 1);
        assert!(matches!(succ[0].0, Event::Tick(_)));
    }
}
