//! Breadth-first reachability over the time-sampled successor relation,
//! with replayable witness traces and an AG wrapper.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use pitpn_core::rat::{one, Rat};
use pitpn_core::{PlaceId, StatePredicate, TransitionId};
use pitpn_strategy::Strategy;

use crate::compiled::CompiledNet;
use crate::state::{ConcreteState, Mode};
use crate::step::{fire, sampled_successors_filtered, tick, Event};
use crate::EngineError;

/// A replayable run: the initial state and each event with the state it
/// produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: ConcreteState,
    pub steps: Vec<(Event, ConcreteState)>,
}

impl Trace {
    pub fn final_state(&self) -> &ConcreteState {
        self.steps.last().map(|(_, s)| s).unwrap_or(&self.initial)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.steps.iter().map(|(e, _)| e)
    }

    /// Re-applies every event from the initial state and checks that the
    /// recorded intermediate states are reproduced exactly.
    pub fn replay(&self, net: &CompiledNet) -> Result<(), EngineError> {
        let mut current = self.initial.clone();
        for (i, (event, recorded)) in self.steps.iter().enumerate() {
            let next = match event {
                Event::Tick(d) => tick(net, &current, d)?,
                Event::Fire(id) => {
                    let ti = net
                        .transition_index(id)
                        .ok_or_else(|| EngineError::Invalid(format!("unknown transition {id}")))?;
                    fire(net, &current, ti)?
                }
            };
            if next != *recorded {
                return Err(EngineError::ReplayMismatch(i));
            }
            current = next;
        }
        Ok(())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.initial)?;
        for (e, s) in &self.steps {
            write!(f, "\n  --{e}--> {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Sampling step for time elapse.
    pub step: Rat,
    /// Explore only states with global time at most this bound.
    pub time_bound: Option<Rat>,
    /// Accept goal states only when global time falls in this window.
    pub time_window: Option<(Rat, Rat)>,
    pub max_depth: Option<usize>,
    pub max_states: usize,
    pub strategy: Strategy,
    /// Forbid consecutive ticks via the alternation flag.
    pub alternating: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            step: one(),
            time_bound: None,
            time_window: None,
            max_depth: None,
            max_states: 1_000_000,
            strategy: Strategy::all(),
            alternating: false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Witness(Trace),
    /// Conclusive: the explored graph was closed under successors.
    NotFound,
    /// A budget or depth limit cut exploration short.
    Inconclusive(String),
}

#[derive(Debug, Clone)]
pub enum AgOutcome {
    Holds,
    CounterExample(Trace),
    Inconclusive(String),
}

fn predicate_needs_global(pred: &StatePredicate) -> bool {
    match pred {
        StatePredicate::GlobalTime(..) => true,
        StatePredicate::Not(p) => predicate_needs_global(p),
        StatePredicate::And(ps) | StatePredicate::Or(ps) => {
            ps.iter().any(predicate_needs_global)
        }
        _ => false,
    }
}

fn eval_pred(
    pred: &StatePredicate,
    net: &CompiledNet,
    s: &ConcreteState,
) -> Result<bool, EngineError> {
    let tokens = |p: &PlaceId| {
        s.tokens(net, p)
            .map(|n| Rat::from_integer(pitpn_core::rat::Int::from(n)))
    };
    let clock = |t: &TransitionId| net.transition_index(t).map(|ti| s.clocks[ti].clone());
    Ok(pred.eval_concrete_in(&net.places, &tokens, &clock, s.global.as_ref())?)
}

struct Bfs<'a> {
    net: &'a CompiledNet,
    opts: &'a SearchOptions,
    states: Vec<ConcreteState>,
    parents: Vec<Option<(usize, Event)>>,
    depths: Vec<usize>,
    visited: HashSet<ConcreteState>,
    queue: VecDeque<usize>,
    truncated: Option<String>,
    explore_bound: Option<Rat>,
}

impl<'a> Bfs<'a> {
    fn new(net: &'a CompiledNet, opts: &'a SearchOptions, timed: bool) -> Self {
        let mode = Mode {
            alternating: opts.alternating,
            timed,
        };
        let init = ConcreteState::initial(net, mode);
        // Past the window's right edge no goal can appear anymore, so the
        // window also bounds exploration.
        let explore_bound = match (&opts.time_bound, &opts.time_window) {
            (Some(d), Some((_, b))) => Some(d.clone().min(b.clone())),
            (Some(d), None) => Some(d.clone()),
            (None, Some((_, b))) => Some(b.clone()),
            (None, None) => None,
        };
        Bfs {
            net,
            opts,
            states: vec![init.clone()],
            parents: vec![None],
            depths: vec![0],
            visited: HashSet::from([init]),
            queue: VecDeque::from([0]),
            truncated: None,
            explore_bound,
        }
    }

    fn trace_to(&self, idx: usize) -> Trace {
        let mut chain = Vec::new();
        let mut cur = idx;
        while let Some((parent, event)) = &self.parents[cur] {
            chain.push((event.clone(), self.states[cur].clone()));
            cur = *parent;
        }
        chain.reverse();
        Trace {
            initial: self.states[0].clone(),
            steps: chain,
        }
    }

    /// Runs the search; returns the index of the first goal state found.
    fn run(
        &mut self,
        mut goal: impl FnMut(&ConcreteState) -> Result<bool, EngineError>,
    ) -> Result<Option<usize>, EngineError> {
        if goal(&self.states[0])? {
            return Ok(Some(0));
        }
        while let Some(cur) = self.queue.pop_front() {
            if self.opts.max_depth.is_some_and(|d| self.depths[cur] >= d) {
                self.truncated = Some("depth limit reached".into());
                continue;
            }
            let succ = sampled_successors_filtered(
                self.net,
                &self.states[cur],
                &self.opts.step,
                &self.opts.strategy,
            );
            for (event, next) in succ {
                if let (Some(bound), Some(gt)) = (&self.explore_bound, &next.global) {
                    if gt > bound {
                        continue;
                    }
                }
                if !self.visited.insert(next.clone()) {
                    continue;
                }
                if self.states.len() >= self.opts.max_states {
                    self.truncated = Some("state budget exhausted".into());
                    return Ok(None);
                }
                let idx = self.states.len();
                self.states.push(next);
                self.parents.push(Some((cur, event)));
                self.depths.push(self.depths[cur] + 1);
                if goal(&self.states[idx])? {
                    return Ok(Some(idx));
                }
                self.queue.push_back(idx);
            }
        }
        Ok(None)
    }
}

/// Breadth-first search for a state satisfying `pred` (within the time
/// window, when given). `NotFound` is reported only when the sampled
/// graph was explored exhaustively.
pub fn search_ef(
    net: &CompiledNet,
    pred: &StatePredicate,
    opts: &SearchOptions,
) -> Result<SearchOutcome, EngineError> {
    let timed = opts.time_bound.is_some()
        || opts.time_window.is_some()
        || predicate_needs_global(pred);
    let mut bfs = Bfs::new(net, opts, timed);
    let window = opts.time_window.clone();
    let found = bfs.run(|s| {
        if let Some((a, b)) = &window {
            let gt = s.global.as_ref().expect("window search is timed");
            if gt < a || gt > b {
                return Ok(false);
            }
        }
        eval_pred(pred, net, s)
    })?;
    match found {
        Some(idx) => {
            let trace = bfs.trace_to(idx);
            trace.replay(net)?;
            Ok(SearchOutcome::Witness(trace))
        }
        None => match bfs.truncated {
            Some(reason) => Ok(SearchOutcome::Inconclusive(reason)),
            None => Ok(SearchOutcome::NotFound),
        },
    }
}

/// AG check as the dual of reachability of the negation.
pub fn check_ag(
    net: &CompiledNet,
    pred: &StatePredicate,
    opts: &SearchOptions,
) -> Result<AgOutcome, EngineError> {
    match search_ef(net, &StatePredicate::not_(pred.clone()), opts)? {
        SearchOutcome::Witness(trace) => Ok(AgOutcome::CounterExample(trace)),
        SearchOutcome::NotFound => Ok(AgOutcome::Holds),
        SearchOutcome::Inconclusive(reason) => Ok(AgOutcome::Inconclusive(reason)),
    }
}

/// Explicit sampled state graph, used by the LTL checker.
#[derive(Debug)]
pub struct SampledGraph {
    pub states: Vec<ConcreteState>,
    pub edges: Vec<Vec<(Event, usize)>>,
    /// Whether the graph is closed under successors (no budget cut).
    pub complete: bool,
}

pub fn build_graph(net: &CompiledNet, opts: &SearchOptions) -> Result<SampledGraph, EngineError> {
    let mut bfs = Bfs::new(net, opts, opts.time_bound.is_some());
    bfs.run(|_| Ok(false))?;
    let index_of: std::collections::HashMap<&ConcreteState, usize> = bfs
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut edges = vec![Vec::new(); bfs.states.len()];
    for (i, s) in bfs.states.iter().enumerate() {
        for (event, next) in sampled_successors_filtered(net, s, &opts.step, &opts.strategy) {
            if let Some(&j) = index_of.get(&next) {
                edges[i].push((event, j));
            }
        }
    }
    Ok(SampledGraph {
        states: bfs.states,
        edges,
        complete: bfs.truncated.is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pitpn_core::formula::Rel;
    use pitpn_core::rat::rat;
    use pitpn_core::samples;

    fn compiled(lo: i64, hi: i64) -> CompiledNet {
        CompiledNet::compile(&samples::producer_consumer_fixed(lo, hi).unwrap()).unwrap()
    }

    fn not_1_safe() -> StatePredicate {
        StatePredicate::not_(StatePredicate::KSafe(1))
    }

    #[test]
    fn finds_unsafe_marking_with_expected_clocks() {
        let net = compiled(3, 4);
        let out = search_ef(&net, &not_1_safe(), &SearchOptions::default()).unwrap();
        let SearchOutcome::Witness(trace) = out else {
            panic!("expected witness");
        };
        let last = trace.final_state();
        let p2 = net.place_index(&"p2".into()).unwrap();
        assert_eq!(last.marking[p2], 2);
        let t3 = net.transition_index(&"t3".into()).unwrap();
        assert_eq!(last.clocks[t3], rat(4));
        for (ti, c) in last.clocks.iter().enumerate() {
            if ti != t3 {
                assert_eq!(*c, rat(0));
            }
        }
    }

    #[test]
    fn tight_interval_is_exhaustively_safe() {
        let net = compiled(2, 3);
        let out = search_ef(&net, &not_1_safe(), &SearchOptions::default()).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound));
        let ag = check_ag(&net, &StatePredicate::KSafe(1), &SearchOptions::default()).unwrap();
        assert!(matches!(ag, AgOutcome::Holds));
    }

    #[test]
    fn two_safety_holds_where_one_safety_fails() {
        let net = compiled(3, 4);
        let ag1 = check_ag(&net, &StatePredicate::KSafe(1), &SearchOptions::default()).unwrap();
        assert!(matches!(ag1, AgOutcome::CounterExample(_)));
        let ag2 = check_ag(&net, &StatePredicate::KSafe(2), &SearchOptions::default()).unwrap();
        assert!(matches!(ag2, AgOutcome::Holds));
        let net35 = compiled(3, 5);
        let ag = check_ag(&net35, &StatePredicate::KSafe(1), &SearchOptions::default());
        assert!(matches!(ag.unwrap(), AgOutcome::CounterExample(_)));
    }

    #[test]
    fn timed_window_witness() {
        let net = compiled(3, 4);
        let pred = StatePredicate::and(vec![
            not_1_safe(),
            StatePredicate::GlobalTime(Rel::Ge, pitpn_core::LinExpr::from_int(5)),
        ]);
        let opts = SearchOptions {
            time_bound: Some(rat(10)),
            ..SearchOptions::default()
        };
        let out = search_ef(&net, &pred, &opts).unwrap();
        let SearchOutcome::Witness(trace) = out else {
            panic!("expected witness");
        };
        assert_eq!(trace.final_state().global, Some(rat(8)));
    }

    #[test]
    fn time_bound_prunes_to_notfound() {
        let net = compiled(3, 4);
        let pred = StatePredicate::and(vec![
            not_1_safe(),
            StatePredicate::GlobalTime(Rel::Ge, pitpn_core::LinExpr::from_int(100)),
        ]);
        let opts = SearchOptions {
            time_bound: Some(rat(10)),
            ..SearchOptions::default()
        };
        let out = search_ef(&net, &pred, &opts).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound));
    }

    #[test]
    fn budget_yields_inconclusive() {
        let net = compiled(3, 5);
        let opts = SearchOptions {
            max_states: 10,
            ..SearchOptions::default()
        };
        let out = search_ef(
            &net,
            &StatePredicate::place_cmp("p3", Rel::Ge, 50),
            &opts,
        )
        .unwrap();
        assert!(matches!(out, SearchOutcome::Inconclusive(_)));
    }

    #[test]
    fn witness_traces_replay() {
        let net = compiled(3, 4);
        let out = search_ef(&net, &not_1_safe(), &SearchOptions::default()).unwrap();
        let SearchOutcome::Witness(trace) = out else {
            panic!("expected witness");
        };
        trace.replay(&net).unwrap();
    }

    #[test]
    fn strategy_restricts_reachability() {
        // Under t3-first the conflict that doubles p2 is resolved in favor
        // of consuming, so every reachable state stays 1-safe.
        let net = compiled(3, 4);
        let opts = SearchOptions {
            strategy: Strategy::prefer_fires(["t3"]),
            ..SearchOptions::default()
        };
        let out = search_ef(&net, &not_1_safe(), &opts).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound));
    }
}
