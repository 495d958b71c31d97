//! Interval-semantics oracle: transitions carry shrinking firing
//! intervals instead of growing clocks. Serves as an independent
//! reference implementation; `bisim_check` verifies that it stays in
//! lockstep with the clock semantics under the documented
//! correspondence.

use std::collections::{HashSet, VecDeque};

use num_traits::Zero;
use pitpn_core::rat::display;
use pitpn_core::Rat;

use crate::compiled::CompiledNet;
use crate::state::{ConcreteState, Mode};
use crate::step::{sampled_successors, Event};
use crate::EngineError;

/// Marking plus one shrinking interval per enabled transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalState {
    pub marking: Vec<u64>,
    /// Indexed by transition; `None` when the transition is disabled.
    /// An interval's upper bound `None` encodes infinity.
    pub intervals: Vec<Option<(Rat, Option<Rat>)>>,
}

impl IntervalState {
    pub fn initial(net: &CompiledNet) -> Self {
        let marking = net.init_marking.clone();
        let intervals = net
            .transitions
            .iter()
            .enumerate()
            .map(|(ti, t)| net.enabled(&marking, ti).then(|| (t.lo.clone(), t.hi.clone())))
            .collect();
        IntervalState { marking, intervals }
    }

    /// Time elapse: enabled non-inhibited intervals shift down, with the
    /// lower end clamped at zero; inhibited ones freeze. Legal only when
    /// no upper end would drop below zero.
    pub fn tick(&self, net: &CompiledNet, delta: &Rat) -> Option<IntervalState> {
        if delta < &Rat::zero() {
            return None;
        }
        for (ti, entry) in self.intervals.iter().enumerate() {
            if let Some((_, Some(hi))) = entry {
                if !net.inhibited(&self.marking, ti) && delta > hi {
                    return None;
                }
            }
        }
        let intervals = self
            .intervals
            .iter()
            .enumerate()
            .map(|(ti, entry)| {
                entry.as_ref().map(|(lo, hi)| {
                    if net.inhibited(&self.marking, ti) {
                        (lo.clone(), hi.clone())
                    } else {
                        let lo2 = (lo - delta).max(Rat::zero());
                        (lo2, hi.as_ref().map(|h| h - delta))
                    }
                })
            })
            .collect();
        Some(IntervalState {
            marking: self.marking.clone(),
            intervals,
        })
    }

    pub fn can_fire(&self, net: &CompiledNet, ti: usize) -> bool {
        net.active(&self.marking, ti)
            && self.intervals[ti]
                .as_ref()
                .is_some_and(|(lo, _)| lo.is_zero())
    }

    /// Firing: tokens move; transitions newly enabled by the move get a
    /// fresh copy of their static interval, those enabled throughout
    /// keep their shrunk one, and disabled entries disappear.
    pub fn fire(&self, net: &CompiledNet, ti: usize) -> Option<IntervalState> {
        if !self.can_fire(net, ti) {
            return None;
        }
        let intermediate = net.intermediate_marking(&self.marking, ti);
        let marking = net.fire_marking(&self.marking, ti);
        let intervals = net
            .transitions
            .iter()
            .enumerate()
            .map(|(tj, t)| {
                if !net.enabled(&marking, tj) {
                    None
                } else if tj == ti || !net.enabled(&intermediate, tj) {
                    Some((t.lo.clone(), t.hi.clone()))
                } else {
                    self.intervals[tj].clone()
                }
            })
            .collect();
        Some(IntervalState { marking, intervals })
    }
}

/// Sampled successor relation of the interval semantics, mirroring the
/// clock engine's: fire successors in declaration order, then the
/// single step tick when legal.
pub fn oracle_successors(
    net: &CompiledNet,
    s: &IntervalState,
    step: &Rat,
) -> Vec<(Event, IntervalState)> {
    let mut out = Vec::new();
    for ti in 0..net.transitions.len() {
        if let Some(next) = s.fire(net, ti) {
            out.push((Event::Fire(net.transitions[ti].id.clone()), next));
        }
    }
    if let Some(next) = s.tick(net, step) {
        out.push((Event::Tick(step.clone()), next));
    }
    out
}

/// The correspondence between clock and interval states: equal
/// markings; for an enabled transition with static interval `[l, u]`
/// and current interval `[l', u']`, the clock reads `u - u'` when `u`
/// is finite; with `u` infinite the clock reads `l - l'` while `l' > 0`
/// and is only bounded below by `l` afterwards.
fn correspond(net: &CompiledNet, cs: &ConcreteState, is: &IntervalState) -> Result<(), String> {
    if cs.marking != is.marking {
        return Err(format!(
            "markings diverged: clock side {:?}, interval side {:?}",
            cs.marking, is.marking
        ));
    }
    for (ti, t) in net.transitions.iter().enumerate() {
        let clock = &cs.clocks[ti];
        match &is.intervals[ti] {
            None => {
                if !clock.is_zero() {
                    return Err(format!(
                        "disabled `{}` should hold clock 0, has {}",
                        t.id,
                        display(clock)
                    ));
                }
            }
            Some((lo, hi)) => match (&t.hi, hi) {
                (Some(ju), Some(iu)) => {
                    let expect = ju - iu;
                    if *clock != expect {
                        return Err(format!(
                            "`{}`: clock {} but interval implies {}",
                            t.id,
                            display(clock),
                            display(&expect)
                        ));
                    }
                }
                (None, None) => {
                    if lo > &Rat::zero() {
                        let expect = &t.lo - lo;
                        if *clock != expect {
                            return Err(format!(
                                "`{}`: clock {} but shrunk lower bound implies {}",
                                t.id,
                                display(clock),
                                display(&expect)
                            ));
                        }
                    } else if *clock < t.lo {
                        return Err(format!(
                            "`{}`: clock {} below released lower bound {}",
                            t.id,
                            display(clock),
                            display(&t.lo)
                        ));
                    }
                }
                _ => {
                    return Err(format!(
                        "`{}`: finite/infinite upper bounds diverged",
                        t.id
                    ));
                }
            },
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct BisimReport {
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

impl BisimReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs both semantics side by side to the given depth over the sampled
/// grid, checking at every matched pair that the correspondence holds
/// and that both sides offer exactly the same events.
pub fn bisim_check(
    net: &CompiledNet,
    depth: usize,
    step: &Rat,
) -> Result<BisimReport, EngineError> {
    let init = (
        ConcreteState::initial(net, Mode::plain()),
        IntervalState::initial(net),
    );
    let mut visited: HashSet<(ConcreteState, IntervalState)> = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([(init, 0usize)]);
    let mut report = BisimReport {
        pairs_checked: 0,
        failures: Vec::new(),
    };
    while let Some(((cs, is), d)) = queue.pop_front() {
        report.pairs_checked += 1;
        if let Err(msg) = correspond(net, &cs, &is) {
            report.failures.push(format!("at depth {d}: {msg}"));
            continue;
        }
        if d >= depth {
            continue;
        }
        let clock_succ = sampled_successors(net, &cs, step);
        let oracle_succ = oracle_successors(net, &is, step);
        let clock_events: Vec<&Event> = clock_succ.iter().map(|(e, _)| e).collect();
        let oracle_events: Vec<&Event> = oracle_succ.iter().map(|(e, _)| e).collect();
        if clock_events != oracle_events {
            report.failures.push(format!(
                "at depth {d}: event menus diverged (clock {:?} vs interval {:?})",
                clock_events, oracle_events
            ));
            continue;
        }
        for ((_, cs2), (_, is2)) in clock_succ.into_iter().zip(oracle_succ) {
            let pair = (cs2, is2);
            if visited.insert(pair.clone()) {
                queue.push_back((pair, d + 1));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pitpn_core::rat::{rat, ratio};
    use pitpn_core::samples;

    #[test]
    fn initial_states_correspond() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let cs = ConcreteState::initial(&net, Mode::plain());
        let is = IntervalState::initial(&net);
        correspond(&net, &cs, &is).unwrap();
    }

    #[test]
    fn tick_shrinks_and_clamps() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let s = IntervalState::initial(&net);
        let t3 = net.transition_index(&"t3".into()).unwrap();
        // t3 = [1, 2]; after 2 units its window is [0, 0], clamped at 0.
        let s2 = s.tick(&net, &rat(2)).unwrap();
        assert_eq!(s2.intervals[t3], Some((rat(0), Some(rat(0)))));
        // Elapsing past an active upper bound is illegal.
        assert!(s.tick(&net, &rat(3)).is_none());
    }

    #[test]
    fn inhibited_interval_freezes() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let s = IntervalState::initial(&net);
        let t2 = net.transition_index(&"t2".into()).unwrap();
        let s2 = s.tick(&net, &rat(2)).unwrap();
        assert_eq!(s2.intervals[t2], Some((rat(3), Some(rat(4)))));
    }

    #[test]
    fn newly_enabled_gets_fresh_interval() {
        let net = CompiledNet::compile(&samples::producer_consumer_fixed(3, 4).unwrap()).unwrap();
        let s = IntervalState::initial(&net);
        let t1 = net.transition_index(&"t1".into()).unwrap();
        let t2 = net.transition_index(&"t2".into()).unwrap();
        let s = s.tick(&net, &rat(3)).unwrap();
        let s = s.fire(&net, t1).unwrap();
        assert_eq!(s.intervals[t2], Some((rat(2), Some(rat(4)))));
        assert_eq!(s.intervals[t1], None);
    }

    #[test]
    fn gate_bisimulation_holds_to_depth_six() {
        let net = CompiledNet::compile(&samples::inhibitor_gate_instance().unwrap()).unwrap();
        let report = bisim_check(&net, 6, &rat(1)).unwrap();
        assert!(report.ok(), "{:?}", report.failures);
        assert!(report.pairs_checked >= 5);
    }

    #[test]
    fn producer_bisimulation_holds_on_fractional_grid() {
        let net = CompiledNet::compile(&samples::producer_consumer_fixed(3, 4).unwrap()).unwrap();
        let report = bisim_check(&net, 6, &ratio(1, 2)).unwrap();
        assert!(report.ok(), "{:?}", report.failures);
    }
}
