//! Execution strategies: ordered preference tiers that restrict which
//! successor options a search explores. A strategy is applied afresh at
//! every step; the hosting engine supplies the applicability oracle
//! (boolean enabledness for the explicit engine, satisfiability of the
//! fire constraint for the symbolic one).

use std::collections::HashMap;
use std::fmt;

use pitpn_core::{Net, TransitionId};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy references unknown transition `{0}`")]
    UnknownTransition(String),
}

/// One step a search can take from a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StepOption {
    Fire(TransitionId),
    Tick,
}

impl StepOption {
    pub fn fire(id: impl Into<TransitionId>) -> Self {
        StepOption::Fire(id.into())
    }

    pub fn is_fire(&self) -> bool {
        matches!(self, StepOption::Fire(_))
    }
}

impl fmt::Display for StepOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepOption::Fire(t) => write!(f, "{t}"),
            StepOption::Tick => write!(f, "tick"),
        }
    }
}

/// Ordered preference tiers over step options. The first tier holding an
/// applicable fire-option wins and replaces the candidate list; after the
/// listed tiers an implicit "all remaining" tier always applies. The
/// empty strategy is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Strategy {
    tiers: Vec<Vec<StepOption>>,
}

impl Strategy {
    /// The identity strategy: every candidate passes.
    pub fn all() -> Self {
        Strategy { tiers: Vec::new() }
    }

    pub fn prefer(tiers: Vec<Vec<StepOption>>) -> Self {
        Strategy { tiers }
    }

    /// Single preferred tier of fire-options, then everything else.
    pub fn prefer_fires<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<TransitionId>,
    {
        Strategy {
            tiers: vec![ids.into_iter().map(StepOption::fire).collect()],
        }
    }

    pub fn is_all(&self) -> bool {
        self.tiers.is_empty()
    }

    pub fn tiers(&self) -> &[Vec<StepOption>] {
        &self.tiers
    }

    /// Checks that every referenced transition exists in `net`.
    pub fn validate(&self, net: &Net) -> Result<(), StrategyError> {
        for opt in self.tiers.iter().flatten() {
            if let StepOption::Fire(t) = opt {
                if net.transition(t).is_err() {
                    return Err(StrategyError::UnknownTransition(t.name().into()));
                }
            }
        }
        Ok(())
    }

    /// Filters `candidates` down to the winning tier. A tier wins if it
    /// holds at least one applicable fire-option among the candidates;
    /// the result keeps candidate order. Tick survives filtering unless
    /// some tier lists it explicitly, in which case it competes like any
    /// other option. With no winning tier the candidates pass unchanged.
    ///
    /// The oracle is consulted at most once per option.
    pub fn filter_successors<F>(
        &self,
        candidates: &[StepOption],
        mut applicable: F,
    ) -> Vec<StepOption>
    where
        F: FnMut(&StepOption) -> bool,
    {
        if self.tiers.is_empty() {
            return candidates.to_vec();
        }
        let tick_managed = self
            .tiers
            .iter()
            .flatten()
            .any(|o| matches!(o, StepOption::Tick));
        let mut memo: HashMap<&StepOption, bool> = HashMap::new();
        for tier in &self.tiers {
            let wins = candidates.iter().any(|c| {
                c.is_fire()
                    && tier.contains(c)
                    && *memo.entry(c).or_insert_with(|| applicable(c))
            });
            if wins {
                return candidates
                    .iter()
                    .filter(|c| {
                        tier.contains(c)
                            || (matches!(c, StepOption::Tick) && !tick_managed)
                    })
                    .cloned()
                    .collect();
            }
        }
        candidates.to_vec()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tiers.is_empty() {
            return write!(f, "all");
        }
        for tier in &self.tiers {
            write!(f, "prefer(")?;
            for (i, opt) in tier.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{opt}")?;
            }
            write!(f, ") or-else ")?;
        }
        write!(f, "all")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn candidates() -> Vec<StepOption> {
        vec![
            StepOption::fire("t1"),
            StepOption::fire("t2"),
            StepOption::fire("t3"),
            StepOption::Tick,
        ]
    }

    #[test]
    fn preferred_tier_replaces_others() {
        let strat = Strategy::prefer_fires(["t3"]);
        let out = strat.filter_successors(&candidates(), |_| true);
        assert_eq!(out, vec![StepOption::fire("t3"), StepOption::Tick]);
    }

    #[test]
    fn inapplicable_tier_falls_through_to_all() {
        let strat = Strategy::prefer_fires(["t3"]);
        let out = strat.filter_successors(&candidates(), |o| *o != StepOption::fire("t3"));
        assert_eq!(out, candidates());
    }

    #[test]
    fn all_is_identity() {
        let strat = Strategy::all();
        let calls = Cell::new(0);
        let out = strat.filter_successors(&candidates(), |_| {
            calls.set(calls.get() + 1);
            true
        });
        assert_eq!(out, candidates());
        assert_eq!(calls.get(), 0);
    }

    #[test]
    fn explicit_tick_tier_manages_tick() {
        let strat = Strategy::prefer(vec![
            vec![StepOption::fire("t1")],
            vec![StepOption::Tick, StepOption::fire("t2")],
        ]);
        let out = strat.filter_successors(&candidates(), |o| *o == StepOption::fire("t2"));
        assert_eq!(out, vec![StepOption::fire("t2"), StepOption::Tick]);

        let out = strat.filter_successors(&candidates(), |o| *o == StepOption::fire("t1"));
        assert_eq!(out, vec![StepOption::fire("t1")]);
    }

    #[test]
    fn oracle_memoized() {
        let strat = Strategy::prefer(vec![
            vec![StepOption::fire("t1")],
            vec![StepOption::fire("t1"), StepOption::fire("t2")],
        ]);
        let calls = Cell::new(0);
        strat.filter_successors(&candidates(), |_| {
            calls.set(calls.get() + 1);
            false
        });
        assert_eq!(calls.get(), 2);
    }

    #[test]
    fn validate_rejects_unknown_ids() {
        let net = pitpn_core::samples::producer_consumer_fixed(3, 4).unwrap();
        assert!(Strategy::prefer_fires(["t3"]).validate(&net).is_ok());
        assert_eq!(
            Strategy::prefer_fires(["nope"]).validate(&net),
            Err(StrategyError::UnknownTransition("nope".into()))
        );
    }

    #[test]
    fn display_round() {
        assert_eq!(Strategy::all().to_string(), "all");
        assert_eq!(
            Strategy::prefer_fires(["t3"]).to_string(),
            "prefer(t3) or-else all"
        );
    }
}
