//! Index-based view of an instantiated net. Places and transitions are
//! referred to by dense indices; arcs carry constant weights and firing
//! intervals constant rational bounds.

use std::collections::HashMap;

use num_traits::Signed;
use pitpn_core::{Marking, Net, PlaceId, Rat, TimeBound, TransitionId};

use crate::EngineError;

#[derive(Debug, Clone)]
pub struct CompiledTransition {
    pub id: TransitionId,
    pub pre: Vec<(usize, u64)>,
    pub post: Vec<(usize, u64)>,
    pub inhibit: Vec<(usize, u64)>,
    pub lo: Rat,
    /// `None` encodes an unbounded latest firing time.
    pub hi: Option<Rat>,
}

#[derive(Debug, Clone)]
pub struct CompiledNet {
    pub name: String,
    pub places: Vec<PlaceId>,
    pub transitions: Vec<CompiledTransition>,
    pub init_marking: Vec<u64>,
    place_idx: HashMap<PlaceId, usize>,
    trans_idx: HashMap<TransitionId, usize>,
}

impl CompiledNet {
    pub fn compile(net: &Net) -> Result<Self, EngineError> {
        if net.is_parametric() {
            return Err(EngineError::Parametric);
        }
        let places: Vec<PlaceId> = net.places().to_vec();
        let place_idx: HashMap<PlaceId, usize> = places
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();

        let mut transitions = Vec::new();
        let mut trans_idx = HashMap::new();
        for t in net.transitions() {
            let lo = constant_bound(&t.interval.lo, &t.id)?;
            if lo.is_negative() {
                return Err(EngineError::MalformedNet(format!(
                    "transition `{}` has negative earliest firing time {lo}",
                    t.id
                )));
            }
            let hi = match &t.interval.hi {
                TimeBound::Infinite => None,
                TimeBound::Finite(e) => {
                    let hi = constant_bound(e, &t.id)?;
                    if hi < lo {
                        return Err(EngineError::MalformedNet(format!(
                            "transition `{}` has empty firing interval [{lo}, {hi}]",
                            t.id
                        )));
                    }
                    Some(hi)
                }
            };
            trans_idx.insert(t.id.clone(), transitions.len());
            transitions.push(CompiledTransition {
                id: t.id.clone(),
                pre: arcs(&t.pre, &place_idx),
                post: arcs(&t.post, &place_idx),
                inhibit: arcs(&t.inhibit, &place_idx),
                lo,
                hi,
            });
        }

        let mut init_marking = vec![0u64; places.len()];
        for (p, e) in net.init_marking().support() {
            let n = e.as_constant().and_then(|r| {
                if r.is_integer() && !r.is_negative() {
                    r.to_integer().try_into().ok()
                } else {
                    None
                }
            });
            let n: u64 = n.ok_or_else(|| {
                EngineError::MalformedNet(format!("initial marking of `{p}` is not a natural"))
            })?;
            init_marking[place_idx[p]] = n;
        }

        Ok(CompiledNet {
            name: net.name.clone(),
            places,
            transitions,
            init_marking,
            place_idx,
            trans_idx,
        })
    }

    pub fn place_index(&self, p: &PlaceId) -> Option<usize> {
        self.place_idx.get(p).copied()
    }

    pub fn transition_index(&self, t: &TransitionId) -> Option<usize> {
        self.trans_idx.get(t).copied()
    }

    pub fn enabled(&self, marking: &[u64], ti: usize) -> bool {
        self.transitions[ti]
            .pre
            .iter()
            .all(|&(p, w)| marking[p] >= w)
    }

    pub fn inhibited(&self, marking: &[u64], ti: usize) -> bool {
        self.transitions[ti]
            .inhibit
            .iter()
            .any(|&(p, w)| marking[p] >= w)
    }

    pub fn active(&self, marking: &[u64], ti: usize) -> bool {
        self.enabled(marking, ti) && !self.inhibited(marking, ti)
    }

    /// Marking after removing `pre` of the fired transition, before the
    /// `post` tokens arrive.
    pub fn intermediate_marking(&self, marking: &[u64], fired: usize) -> Vec<u64> {
        let mut m = marking.to_vec();
        for &(p, w) in &self.transitions[fired].pre {
            m[p] -= w;
        }
        m
    }

    pub fn fire_marking(&self, marking: &[u64], fired: usize) -> Vec<u64> {
        let mut m = self.intermediate_marking(marking, fired);
        for &(p, w) in &self.transitions[fired].post {
            m[p] += w;
        }
        m
    }
}

fn arcs(m: &Marking, place_idx: &HashMap<PlaceId, usize>) -> Vec<(usize, u64)> {
    let mut out: Vec<(usize, u64)> = m
        .support()
        .map(|(p, e)| {
            let w = e
                .as_constant()
                .map(|r| r.to_integer())
                .and_then(|n| u64::try_from(n).ok())
                .expect("arc weights are validated at net construction");
            (place_idx[p], w)
        })
        .collect();
    out.sort_unstable();
    out
}

fn constant_bound(
    e: &pitpn_core::LinExpr,
    t: &TransitionId,
) -> Result<Rat, EngineError> {
    e.as_constant().cloned().ok_or_else(|| {
        EngineError::MalformedNet(format!("transition `{t}` has a non-constant bound {e}"))
    })
}
