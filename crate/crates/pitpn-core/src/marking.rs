//! Markings: maps from places to integer-sorted expressions.
//!
//! Entries that are absent denote the constant 0, so sparse arc multisets
//! and total initial markings share one representation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::expr::{LinExpr, Var};
use crate::net::PlaceId;
use crate::rat::{Int, Rat};
use crate::CoreError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Marking {
    entries: BTreeMap<PlaceId, LinExpr>,
}

impl Marking {
    pub fn empty() -> Self {
        Marking::default()
    }

    /// Marking with constant token counts; zero entries are dropped.
    pub fn from_consts<I, P>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (P, u64)>,
        P: Into<PlaceId>,
    {
        let mut m = Marking::empty();
        for (p, n) in pairs {
            m.set(p.into(), LinExpr::from_int(n as i64));
        }
        m
    }

    pub fn set(&mut self, place: PlaceId, expr: LinExpr) {
        if expr.as_constant().is_some_and(|c| c.is_zero()) {
            self.entries.remove(&place);
        } else {
            self.entries.insert(place, expr);
        }
    }

    /// Token expression for a place; absent entries read as 0.
    pub fn get(&self, place: &PlaceId) -> LinExpr {
        self.entries.get(place).cloned().unwrap_or_else(LinExpr::zero)
    }

    pub fn entry(&self, place: &PlaceId) -> Option<&LinExpr> {
        self.entries.get(place)
    }

    /// Places with a stored (nonzero or symbolic) entry.
    pub fn support(&self) -> impl Iterator<Item = (&PlaceId, &LinExpr)> {
        self.entries.iter()
    }

    pub fn is_constant(&self) -> bool {
        self.entries.values().all(|e| e.is_constant())
    }

    /// Constant view; fails on symbolic entries or fractional counts.
    pub fn as_constant(&self) -> Option<BTreeMap<PlaceId, Int>> {
        let mut out = BTreeMap::new();
        for (p, e) in &self.entries {
            let c = e.as_constant()?;
            if !c.is_integer() {
                return None;
            }
            out.insert(p.clone(), c.numer().clone());
        }
        Some(out)
    }

    /// Per-place sum.
    pub fn add(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (p, e) in &other.entries {
            let sum = out.get(p).add(e);
            out.set(p.clone(), sum);
        }
        out
    }

    /// Per-place difference.
    pub fn sub(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (p, e) in &other.entries {
            let diff = out.get(p).sub(e);
            out.set(p.clone(), diff);
        }
        out
    }

    /// Sum of all entries, as an expression.
    pub fn total(&self) -> LinExpr {
        self.entries
            .values()
            .fold(LinExpr::zero(), |acc, e| acc.add(e))
    }

    /// Evaluates every entry under the environment, e.g. a marking
    /// parameter valuation.
    pub fn eval<F>(&self, env: &F) -> Result<BTreeMap<PlaceId, Rat>, CoreError>
    where
        F: Fn(&Var) -> Option<Rat>,
    {
        let mut out = BTreeMap::new();
        for (p, e) in &self.entries {
            out.insert(p.clone(), e.eval(env)?);
        }
        Ok(out)
    }

    pub fn subst(&self, map: &BTreeMap<Var, LinExpr>) -> Marking {
        let mut out = Marking::empty();
        for (p, e) in &self.entries {
            out.set(p.clone(), e.subst(map));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

impl<P: Into<PlaceId>> FromIterator<(P, LinExpr)> for Marking {
    fn from_iter<I: IntoIterator<Item = (P, LinExpr)>>(iter: I) -> Self {
        let mut m = Marking::empty();
        for (p, e) in iter {
            m.set(p.into(), e);
        }
        m
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p} -> {e}")?;
        }
        Ok(())
    }
}
