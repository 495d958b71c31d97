//! LTL model checking over the sampled state graph: negate the
//! property, translate to a Buechi automaton by the standard tableau
//! construction, take the product with the (totalized) state graph, and
//! hunt for an accepting lasso with a nested depth-first search.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use pitpn_core::{PlaceId, Rat, StatePredicate, TransitionId};

use crate::compiled::CompiledNet;
use crate::search::{build_graph, SampledGraph, SearchOptions, Trace};
use crate::state::ConcreteState;
use crate::step::Event;
use crate::EngineError;

#[derive(Debug, Clone, PartialEq)]
pub enum Ltl {
    True,
    False,
    Prop(StatePredicate),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn prop(p: StatePredicate) -> Self {
        Ltl::Prop(p)
    }

    pub fn not_(f: Ltl) -> Self {
        Ltl::Not(Box::new(f))
    }

    pub fn and(f: Ltl, g: Ltl) -> Self {
        Ltl::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Ltl, g: Ltl) -> Self {
        Ltl::Or(Box::new(f), Box::new(g))
    }

    pub fn next(f: Ltl) -> Self {
        Ltl::Next(Box::new(f))
    }

    pub fn until(f: Ltl, g: Ltl) -> Self {
        Ltl::Until(Box::new(f), Box::new(g))
    }

    pub fn release(f: Ltl, g: Ltl) -> Self {
        Ltl::Release(Box::new(f), Box::new(g))
    }

    pub fn eventually(f: Ltl) -> Self {
        Ltl::until(Ltl::True, f)
    }

    pub fn globally(f: Ltl) -> Self {
        Ltl::release(Ltl::False, f)
    }

    pub fn implies(f: Ltl, g: Ltl) -> Self {
        Ltl::or(Ltl::not_(f), g)
    }

    /// Negation normal form: negations pushed down to propositions.
    fn nnf(&self) -> Ltl {
        match self {
            Ltl::True | Ltl::False | Ltl::Prop(_) => self.clone(),
            Ltl::Not(f) => f.nnf_negated(),
            Ltl::And(f, g) => Ltl::and(f.nnf(), g.nnf()),
            Ltl::Or(f, g) => Ltl::or(f.nnf(), g.nnf()),
            Ltl::Next(f) => Ltl::next(f.nnf()),
            Ltl::Until(f, g) => Ltl::until(f.nnf(), g.nnf()),
            Ltl::Release(f, g) => Ltl::release(f.nnf(), g.nnf()),
        }
    }

    fn nnf_negated(&self) -> Ltl {
        match self {
            Ltl::True => Ltl::False,
            Ltl::False => Ltl::True,
            Ltl::Prop(_) => Ltl::not_(self.clone()),
            Ltl::Not(f) => f.nnf(),
            Ltl::And(f, g) => Ltl::or(f.nnf_negated(), g.nnf_negated()),
            Ltl::Or(f, g) => Ltl::and(f.nnf_negated(), g.nnf_negated()),
            Ltl::Next(f) => Ltl::next(f.nnf_negated()),
            Ltl::Until(f, g) => Ltl::release(f.nnf_negated(), g.nnf_negated()),
            Ltl::Release(f, g) => Ltl::until(f.nnf_negated(), g.nnf_negated()),
        }
    }
}

/// An infinite run presented finitely: a stem followed by a cycle that
/// starts and ends at the stem's final state.
#[derive(Debug, Clone)]
pub struct Lasso {
    pub stem: Trace,
    pub cycle: Vec<(Event, ConcreteState)>,
}

impl Lasso {
    /// The states of the run, cycle positions marked.
    pub fn loop_start(&self) -> usize {
        self.stem.len()
    }
}

#[derive(Debug, Clone)]
pub enum LtlOutcome {
    Holds,
    CounterExample(Lasso),
    Inconclusive(String),
}

/// Indexed NNF subformulas; identity is structural.
struct Closure {
    forms: Vec<Ltl>,
}

impl Closure {
    fn new() -> Self {
        Closure { forms: Vec::new() }
    }

    fn id(&mut self, f: &Ltl) -> usize {
        if let Some(i) = self.forms.iter().position(|g| g == f) {
            return i;
        }
        // Register subformulas first so ids exist before the parent.
        match f {
            Ltl::True | Ltl::False | Ltl::Prop(_) => {}
            Ltl::Not(g) | Ltl::Next(g) => {
                self.id(g);
            }
            Ltl::And(g, h) | Ltl::Or(g, h) | Ltl::Until(g, h) | Ltl::Release(g, h) => {
                self.id(g);
                self.id(h);
            }
        }
        if let Some(i) = self.forms.iter().position(|g| g == f) {
            return i;
        }
        self.forms.push(f.clone());
        self.forms.len() - 1
    }

    fn get(&self, i: usize) -> &Ltl {
        &self.forms[i]
    }

    /// For a literal, the id of its negation when present.
    fn negation_of(&self, i: usize) -> Option<usize> {
        let neg = match self.get(i) {
            Ltl::Prop(_) => Ltl::not_(self.get(i).clone()),
            Ltl::Not(g) => (**g).clone(),
            Ltl::True => Ltl::False,
            Ltl::False => Ltl::True,
            _ => return None,
        };
        self.forms.iter().position(|g| *g == neg)
    }
}

const INIT_MARK: usize = usize::MAX;

#[derive(Debug, Clone)]
struct TableauNode {
    incoming: BTreeSet<usize>,
    new: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

/// Classic on-the-fly tableau: produces the generalized Buechi
/// automaton for an NNF formula.
fn tableau(closure: &mut Closure, phi: &Ltl) -> Vec<TableauNode> {
    let phi_id = closure.id(phi);
    let mut completed: Vec<TableauNode> = Vec::new();
    let mut pending = vec![TableauNode {
        incoming: BTreeSet::from([INIT_MARK]),
        new: BTreeSet::from([phi_id]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut node) = pending.pop() {
        let Some(&f) = node.new.iter().next() else {
            if let Some(existing) = completed
                .iter_mut()
                .find(|m| m.old == node.old && m.next == node.next)
            {
                existing.incoming.extend(node.incoming);
                continue;
            }
            let id = completed.len();
            completed.push(node.clone());
            pending.push(TableauNode {
                incoming: BTreeSet::from([id]),
                new: node.next.clone(),
                old: BTreeSet::new(),
                next: BTreeSet::new(),
            });
            continue;
        };
        node.new.remove(&f);
        match closure.get(f).clone() {
            Ltl::False => {}
            Ltl::True => {
                node.old.insert(f);
                pending.push(node);
            }
            Ltl::Prop(_) | Ltl::Not(_) => {
                if closure.negation_of(f).is_some_and(|n| node.old.contains(&n)) {
                    continue;
                }
                node.old.insert(f);
                pending.push(node);
            }
            Ltl::And(g, h) => {
                let (gi, hi) = (closure.id(&g), closure.id(&h));
                node.old.insert(f);
                for sub in [gi, hi] {
                    if !node.old.contains(&sub) {
                        node.new.insert(sub);
                    }
                }
                pending.push(node);
            }
            Ltl::Or(g, h) => {
                let (gi, hi) = (closure.id(&g), closure.id(&h));
                node.old.insert(f);
                let mut left = node.clone();
                if !left.old.contains(&gi) {
                    left.new.insert(gi);
                }
                let mut right = node;
                if !right.old.contains(&hi) {
                    right.new.insert(hi);
                }
                pending.push(left);
                pending.push(right);
            }
            Ltl::Next(g) => {
                let gi = closure.id(&g);
                node.old.insert(f);
                node.next.insert(gi);
                pending.push(node);
            }
            Ltl::Until(g, h) => {
                let (gi, hi) = (closure.id(&g), closure.id(&h));
                node.old.insert(f);
                let mut cont = node.clone();
                if !cont.old.contains(&gi) {
                    cont.new.insert(gi);
                }
                cont.next.insert(f);
                let mut done = node;
                if !done.old.contains(&hi) {
                    done.new.insert(hi);
                }
                pending.push(cont);
                pending.push(done);
            }
            Ltl::Release(g, h) => {
                let (gi, hi) = (closure.id(&g), closure.id(&h));
                node.old.insert(f);
                let mut hold = node.clone();
                if !hold.old.contains(&hi) {
                    hold.new.insert(hi);
                }
                hold.next.insert(f);
                let mut close = node;
                for sub in [gi, hi] {
                    if !close.old.contains(&sub) {
                        close.new.insert(sub);
                    }
                }
                pending.push(hold);
                pending.push(close);
            }
        }
    }
    completed
}

/// Evaluates every proposition of the closure on every graph state.
fn label_states(
    closure: &Closure,
    net: &CompiledNet,
    graph: &SampledGraph,
) -> Result<Vec<Vec<bool>>, EngineError> {
    let props: Vec<(usize, &StatePredicate)> = closure
        .forms
        .iter()
        .enumerate()
        .filter_map(|(i, f)| match f {
            Ltl::Prop(p) => Some((i, p)),
            _ => None,
        })
        .collect();
    let mut labels = vec![vec![false; closure.forms.len()]; graph.states.len()];
    for (si, s) in graph.states.iter().enumerate() {
        for (fi, p) in &props {
            labels[si][*fi] = eval_prop(p, net, s)?;
        }
    }
    Ok(labels)
}

fn eval_prop(
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

/// Does the automaton node's label hold in the Kripke state?
fn node_consistent(closure: &Closure, node: &TableauNode, state_labels: &[bool]) -> bool {
    node.old.iter().all(|&f| match closure.get(f) {
        Ltl::Prop(_) => state_labels[f],
        Ltl::Not(inner) => match inner.as_ref() {
            Ltl::Prop(_) => {
                let prop_id = closure
                    .forms
                    .iter()
                    .position(|g| g == inner.as_ref())
                    .expect("negated proposition is registered");
                !state_labels[prop_id]
            }
            _ => true,
        },
        _ => true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ProductState {
    kripke: usize,
    node: usize,
    counter: usize,
}

struct Product<'a> {
    closure: &'a Closure,
    nodes: &'a [TableauNode],
    graph: &'a SampledGraph,
    labels: &'a [Vec<bool>],
    /// Accepting sets of the generalized condition, one per Until.
    accepting_sets: Vec<BTreeSet<usize>>,
    /// Automaton successors: node -> nodes it feeds into.
    node_succ: Vec<Vec<usize>>,
    initial_nodes: Vec<usize>,
}

impl<'a> Product<'a> {
    fn new(
        closure: &'a Closure,
        nodes: &'a [TableauNode],
        graph: &'a SampledGraph,
        labels: &'a [Vec<bool>],
    ) -> Self {
        let mut accepting_sets = Vec::new();
        for (fi, f) in closure.forms.iter().enumerate() {
            if let Ltl::Until(_, h) = f {
                let hi = closure
                    .forms
                    .iter()
                    .position(|g| g == h.as_ref())
                    .expect("until operand is registered");
                let set = nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| !n.old.contains(&fi) || n.old.contains(&hi))
                    .map(|(i, _)| i)
                    .collect();
                accepting_sets.push(set);
            }
        }
        if accepting_sets.is_empty() {
            accepting_sets.push((0..nodes.len()).collect());
        }
        let mut node_succ = vec![Vec::new(); nodes.len()];
        let mut initial_nodes = Vec::new();
        for (ni, n) in nodes.iter().enumerate() {
            for &src in &n.incoming {
                if src == INIT_MARK {
                    initial_nodes.push(ni);
                } else {
                    node_succ[src].push(ni);
                }
            }
        }
        Product {
            closure,
            nodes,
            graph,
            labels,
            accepting_sets,
            node_succ,
            initial_nodes,
        }
    }

    fn initial_states(&self) -> Vec<ProductState> {
        self.initial_nodes
            .iter()
            .filter(|&&n| node_consistent(self.closure, &self.nodes[n], &self.labels[0]))
            .map(|&n| ProductState {
                kripke: 0,
                node: n,
                counter: 0,
            })
            .collect()
    }

    fn is_accepting(&self, s: &ProductState) -> bool {
        s.counter == 0 && self.accepting_sets[0].contains(&s.node)
    }

    /// Successors with the Kripke event taken; deadlocked Kripke states
    /// stutter via a zero tick.
    fn successors(&self, s: &ProductState) -> Vec<(Event, ProductState)> {
        let next_counter = if self.accepting_sets[s.counter].contains(&s.node) {
            (s.counter + 1) % self.accepting_sets.len()
        } else {
            s.counter
        };
        let kripke_edges: Vec<(Event, usize)> = if self.graph.edges[s.kripke].is_empty() {
            vec![(Event::Tick(Rat::zero()), s.kripke)]
        } else {
            self.graph.edges[s.kripke].clone()
        };
        let mut out = Vec::new();
        for (event, k2) in kripke_edges {
            for &n2 in &self.node_succ[s.node] {
                if node_consistent(self.closure, &self.nodes[n2], &self.labels[k2]) {
                    out.push((
                        event.clone(),
                        ProductState {
                            kripke: k2,
                            node: n2,
                            counter: next_counter,
                        },
                    ));
                }
            }
        }
        out
    }
}

/// Nested search for a reachable accepting cycle. Returns the product
/// lasso as (stem states, cycle states), both with entering events.
fn find_accepting_lasso(
    product: &Product,
) -> Option<(Vec<(Event, ProductState)>, Vec<(Event, ProductState)>)> {
    let mut blue: HashMap<ProductState, bool> = HashMap::new(); // value: fully processed
    let mut red: std::collections::HashSet<ProductState> = std::collections::HashSet::new();

    for init in product.initial_states() {
        if blue.contains_key(&init) {
            continue;
        }
        // Iterative blue DFS; stack entries carry the pending successors
        // and the event that entered the state.
        let mut stack: Vec<(ProductState, Option<Event>, Vec<(Event, ProductState)>, usize)> =
            vec![(init, None, product.successors(&init), 0)];
        blue.insert(init, false);
        while !stack.is_empty() {
            let top = stack.last_mut().expect("loop guard");
            if top.3 < top.2.len() {
                let (event, next) = top.2[top.3].clone();
                top.3 += 1;
                if !blue.contains_key(&next) {
                    blue.insert(next, false);
                    let next_succs = product.successors(&next);
                    stack.push((next, Some(event), next_succs, 0));
                }
                continue;
            }
            let state = top.0;
            // Post-order: launch the red search from accepting states.
            if product.is_accepting(&state) {
                let on_stack: std::collections::HashSet<ProductState> =
                    stack.iter().map(|(s, ..)| *s).collect();
                if let Some(cycle) = red_search(product, &state, &on_stack, &mut red, &stack) {
                    let stem = stack
                        .iter()
                        .filter_map(|(s, e, ..)| e.clone().map(|e| (e, *s)))
                        .collect();
                    return Some((stem, cycle));
                }
            }
            blue.insert(state, true);
            stack.pop();
        }
    }
    None
}

/// Breadth-first hunt from `seed` for `seed` itself or any state on the
/// blue stack; visited states are marked red permanently (they provably
/// lie on no accepting cycle once the search fails).
fn red_search(
    product: &Product,
    seed: &ProductState,
    on_stack: &std::collections::HashSet<ProductState>,
    red: &mut std::collections::HashSet<ProductState>,
    stack: &[(ProductState, Option<Event>, Vec<(Event, ProductState)>, usize)],
) -> Option<Vec<(Event, ProductState)>> {
    let mut parents: HashMap<ProductState, (ProductState, Event)> = HashMap::new();
    let mut queue = VecDeque::from([*seed]);
    let mut local: std::collections::HashSet<ProductState> =
        std::collections::HashSet::from([*seed]);
    let mut hit: Option<(ProductState, Event, ProductState)> = None;
    'bfs: while let Some(cur) = queue.pop_front() {
        for (event, next) in product.successors(&cur) {
            if next == *seed || on_stack.contains(&next) {
                hit = Some((cur, event, next));
                break 'bfs;
            }
            if red.contains(&next) || !local.insert(next) {
                continue;
            }
            parents.insert(next, (cur, event.clone()));
            queue.push_back(next);
        }
    }
    let Some((pre, event, target)) = hit else {
        red.extend(local);
        return None;
    };
    // Path seed -> ... -> pre -> target.
    let mut back = Vec::new();
    let mut cur = pre;
    while cur != *seed {
        let (prev, ev) = parents[&cur].clone();
        back.push((ev, cur));
        cur = prev;
    }
    back.reverse();
    back.push((event, target));
    if target == *seed {
        return Some(back);
    }
    // Close the loop along the blue stack from the stack hit back to the
    // seed, which sits on top of the stack.
    let pos = stack
        .iter()
        .position(|(s, ..)| *s == target)
        .expect("hit state is on the stack");
    for (s, e, ..) in &stack[pos + 1..] {
        back.push((e.clone().expect("non-root stack entries have events"), *s));
    }
    Some(back)
}

/// Checks that every infinite run of the sampled graph satisfies `phi`.
/// The graph is totalized with zero-tick self-loops on deadlocks so
/// that finite maximal runs are stuttered.
pub fn model_check_ltl(
    net: &CompiledNet,
    phi: &Ltl,
    opts: &SearchOptions,
) -> Result<LtlOutcome, EngineError> {
    let graph = build_graph(net, opts)?;
    if !graph.complete {
        return Ok(LtlOutcome::Inconclusive(
            "state budget exhausted while building the graph".into(),
        ));
    }
    let negated = Ltl::not_(phi.clone()).nnf();
    let mut closure = Closure::new();
    let nodes = tableau(&mut closure, &negated);
    let labels = label_states(&closure, net, &graph)?;
    let product = Product::new(&closure, &nodes, &graph, &labels);
    match find_accepting_lasso(&product) {
        None => Ok(LtlOutcome::Holds),
        Some((stem, cycle)) => {
            let stem_steps: Vec<(Event, ConcreteState)> = stem
                .iter()
                .map(|(e, s)| (e.clone(), graph.states[s.kripke].clone()))
                .collect();
            let cycle_steps: Vec<(Event, ConcreteState)> = cycle
                .iter()
                .map(|(e, s)| (e.clone(), graph.states[s.kripke].clone()))
                .collect();
            Ok(LtlOutcome::CounterExample(Lasso {
                stem: Trace {
                    initial: graph.states[0].clone(),
                    steps: stem_steps,
                },
                cycle: cycle_steps,
            }))
        }
    }
}

/// Finitary LTL semantics on an ultimately periodic word, evaluated by
/// fixpoint iteration. `word` is the stem followed by the cycle;
/// position `word.len()` wraps to `loop_start`. Used as an independent
/// oracle against the automaton pipeline.
pub fn eval_lasso<S>(
    phi: &Ltl,
    word: &[S],
    loop_start: usize,
    prop: &impl Fn(&StatePredicate, &S) -> bool,
) -> bool {
    assert!(loop_start < word.len(), "cycle must be non-empty");
    values(phi, word, loop_start, prop)[0]
}

fn values<S>(
    phi: &Ltl,
    word: &[S],
    loop_start: usize,
    prop: &impl Fn(&StatePredicate, &S) -> bool,
) -> Vec<bool> {
    let n = word.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    match phi {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Prop(p) => word.iter().map(|s| prop(p, s)).collect(),
        Ltl::Not(f) => values(f, word, loop_start, prop)
            .into_iter()
            .map(|b| !b)
            .collect(),
        Ltl::And(f, g) => {
            let (a, b) = (
                values(f, word, loop_start, prop),
                values(g, word, loop_start, prop),
            );
            a.into_iter().zip(b).map(|(x, y)| x && y).collect()
        }
        Ltl::Or(f, g) => {
            let (a, b) = (
                values(f, word, loop_start, prop),
                values(g, word, loop_start, prop),
            );
            a.into_iter().zip(b).map(|(x, y)| x || y).collect()
        }
        Ltl::Next(f) => {
            let a = values(f, word, loop_start, prop);
            (0..n).map(|i| a[succ(i)]).collect()
        }
        Ltl::Until(f, g) => {
            let (a, b) = (
                values(f, word, loop_start, prop),
                values(g, word, loop_start, prop),
            );
            // Least fixpoint of v = b or (a and v after one step).
            let mut v = vec![false; n];
            for _ in 0..=n {
                for i in 0..n {
                    v[i] = b[i] || (a[i] && v[succ(i)]);
                }
            }
            v
        }
        Ltl::Release(f, g) => {
            let (a, b) = (
                values(f, word, loop_start, prop),
                values(g, word, loop_start, prop),
            );
            // Greatest fixpoint of v = b and (a or v after one step).
            let mut v = vec![true; n];
            for _ in 0..=n {
                for i in 0..n {
                    v[i] = b[i] && (a[i] || v[succ(i)]);
                }
            }
            v
        }
    }
}
