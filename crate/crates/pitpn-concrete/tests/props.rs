//! Property tests for the explicit-state engine: agreement between the
//! plain and alternating semantics, global-time bookkeeping, trace
//! replay, and strategy containment.

use std::collections::HashSet;

use pitpn_concrete::{
    fire, mte, sampled_successors, sampled_successors_filtered, tick, CompiledNet, ConcreteState,
    Event, Mode, Trace,
};
use pitpn_core::rat::{rat, ratio, Rat};
use pitpn_core::samples;
use pitpn_strategy::Strategy;
use proptest::prelude::*;

fn compiled(which: u8) -> CompiledNet {
    let net = match which {
        0 => samples::producer_consumer_fixed(3, 4).unwrap(),
        1 => samples::producer_consumer_fixed(2, 3).unwrap(),
        _ => samples::inhibitor_gate_instance().unwrap(),
    };
    CompiledNet::compile(&net).unwrap()
}

/// Reachable (marking, clocks) pairs under single-step sampling without
/// the alternation flag.
fn plain_reachable(net: &CompiledNet, step: &Rat, cap: usize) -> HashSet<(Vec<u64>, Vec<Rat>)> {
    let mut seen = HashSet::new();
    let mut frontier = vec![ConcreteState::initial(net, Mode::plain())];
    seen.insert((frontier[0].marking.clone(), frontier[0].clocks.clone()));
    while let Some(s) = frontier.pop() {
        if seen.len() > cap {
            panic!("state cap exceeded");
        }
        for (_, next) in sampled_successors(net, &s, step) {
            if seen.insert((next.marking.clone(), next.clocks.clone())) {
                frontier.push(next);
            }
        }
    }
    seen
}

/// Successors of the alternating semantics where a tick may cover any
/// multiple of the step up to the maximal time elapse. Merging a run of
/// single-step ticks into one big tick is exactly what the alternation
/// flag forces.
fn alternating_multistep_successors(
    net: &CompiledNet,
    s: &ConcreteState,
    step: &Rat,
) -> Vec<ConcreteState> {
    let mut out = Vec::new();
    for ti in 0..net.transitions.len() {
        if let Ok(next) = fire(net, s, ti) {
            out.push(next);
        }
    }
    if s.tick_ok == Some(true) {
        let mut delta = step.clone();
        loop {
            if let Some(bound) = mte(net, s) {
                if delta > bound {
                    break;
                }
            }
            out.push(tick(net, s, &delta).expect("delta is within the bound"));
            delta += step;
            if delta > rat(1000) {
                break;
            }
        }
    }
    out
}

fn alternating_reachable(
    net: &CompiledNet,
    step: &Rat,
    cap: usize,
) -> HashSet<(Vec<u64>, Vec<Rat>)> {
    let mut seen_states: HashSet<ConcreteState> = HashSet::new();
    let mut projected = HashSet::new();
    let init = ConcreteState::initial(net, Mode::alternating());
    projected.insert((init.marking.clone(), init.clocks.clone()));
    seen_states.insert(init.clone());
    let mut frontier = vec![init];
    while let Some(s) = frontier.pop() {
        if seen_states.len() > cap {
            panic!("state cap exceeded");
        }
        for next in alternating_multistep_successors(net, &s, step) {
            projected.insert((next.marking.clone(), next.clocks.clone()));
            if seen_states.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    projected
}

#[test]
fn alternation_preserves_reachability() {
    for which in 0..3u8 {
        let net = compiled(which);
        let plain = plain_reachable(&net, &rat(1), 100_000);
        let alt = alternating_reachable(&net, &rat(1), 200_000);
        assert_eq!(plain, alt, "net {which}");
    }
}

#[test]
fn alternation_preserves_reachability_on_fractional_grid() {
    let net = compiled(2);
    let step = ratio(1, 2);
    let plain = plain_reachable(&net, &step, 100_000);
    let alt = alternating_reachable(&net, &step, 200_000);
    assert_eq!(plain, alt);
}

/// Drives a pseudo-random walk, returning the trace.
fn random_walk(net: &CompiledNet, mode: Mode, choices: &[u8], step: &Rat) -> Trace {
    let mut current = ConcreteState::initial(net, mode);
    let initial = current.clone();
    let mut steps = Vec::new();
    for &c in choices {
        let succ = sampled_successors(net, &current, step);
        if succ.is_empty() {
            break;
        }
        let (event, next) = succ[c as usize % succ.len()].clone();
        steps.push((event, next.clone()));
        current = next;
    }
    Trace { initial, steps }
}

proptest! {
    #[test]
    fn global_time_sums_ticks(choices in proptest::collection::vec(any::<u8>(), 0..60), which in 0..3u8) {
        let net = compiled(which);
        let trace = random_walk(&net, Mode::timed(), &choices, &rat(1));
        let mut total = rat(0);
        for (event, state) in &trace.steps {
            if let Event::Tick(d) = event {
                total += d;
            }
            prop_assert_eq!(state.global.as_ref(), Some(&total));
        }
    }

    #[test]
    fn traces_replay_exactly(choices in proptest::collection::vec(any::<u8>(), 0..60), which in 0..3u8) {
        let net = compiled(which);
        let trace = random_walk(&net, Mode::plain(), &choices, &rat(1));
        prop_assert!(trace.replay(&net).is_ok());
    }

    #[test]
    fn strategy_never_adds_successors(choices in proptest::collection::vec(any::<u8>(), 0..40), which in 0..3u8) {
        let net = compiled(which);
        let strat = Strategy::prefer_fires(["t3"]);
        let mut current = ConcreteState::initial(&net, Mode::plain());
        for &c in &choices {
            let unrestricted = sampled_successors(&net, &current, &rat(1));
            let restricted = sampled_successors_filtered(&net, &current, &rat(1), &strat);
            for pair in &restricted {
                prop_assert!(unrestricted.contains(pair));
            }
            if unrestricted.is_empty() {
                break;
            }
            current = unrestricted[c as usize % unrestricted.len()].1.clone();
        }
    }
}
