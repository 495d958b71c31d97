//! Sorted variables and linear expressions over exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::rat::{self, Rat};
use crate::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Real,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Real => write!(f, "Real"),
        }
    }
}

/// A solver variable with an explicit sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn real(name: impl Into<String>) -> Self {
        Var { name: name.into(), sort: Sort::Real }
    }

    pub fn int(name: impl Into<String>) -> Self {
        Var { name: name.into(), sort: Sort::Int }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A linear expression: rational constant plus rational-weighted variables.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    pub constant: Rat,
    pub terms: BTreeMap<Var, Rat>,
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr::default()
    }

    pub fn constant(c: Rat) -> Self {
        LinExpr { constant: c, terms: BTreeMap::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rat::rat(n))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, rat::one());
        LinExpr { constant: rat::zero(), terms }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rat> {
        self.terms.is_empty().then_some(&self.constant)
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, c) in &other.terms {
            let entry = out.terms.entry(v.clone()).or_insert_with(rat::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(v);
            }
        }
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&rat::rat(-1))
    }

    pub fn scale(&self, k: &Rat) -> LinExpr {
        if k.is_zero() {
            return LinExpr::zero();
        }
        LinExpr {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    pub fn add_const(&self, k: &Rat) -> LinExpr {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys()
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        out.extend(self.terms.keys().cloned());
    }

    /// Sort of the expression: Real if any variable is real-sorted or the
    /// constant part is fractional, Int otherwise.
    pub fn sort(&self) -> Sort {
        if self.terms.keys().any(|v| v.sort == Sort::Real)
            || !self.constant.is_integer()
            || self.terms.values().any(|c| !c.is_integer())
        {
            Sort::Real
        } else {
            Sort::Int
        }
    }

    pub fn eval<F>(&self, env: &F) -> Result<Rat, CoreError>
    where
        F: Fn(&Var) -> Option<Rat>,
    {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            let val = env(v).ok_or_else(|| CoreError::UnboundVar(v.name.clone()))?;
            acc += c * val;
        }
        Ok(acc)
    }

    /// Substitutes variables by linear expressions; unmapped variables stay.
    pub fn subst(&self, map: &BTreeMap<Var, LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.terms {
            match map.get(v) {
                Some(e) => out = out.add(&e.scale(c)),
                None => {
                    let entry = out.terms.entry(v.clone()).or_insert_with(rat::zero);
                    *entry += c;
                    if entry.is_zero() {
                        out.terms.remove(v);
                    }
                }
            }
        }
        out
    }
}

impl From<i64> for LinExpr {
    fn from(n: i64) -> Self {
        LinExpr::from_int(n)
    }
}

impl From<Var> for LinExpr {
    fn from(v: Var) -> Self {
        LinExpr::var(v)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            if first {
                if *c == rat::rat(1) {
                    write!(f, "{v}")?;
                } else if *c == rat::rat(-1) {
                    write!(f, "-{v}")?;
                } else {
                    write!(f, "{}*{v}", rat::display(c))?;
                }
                first = false;
            } else if c.is_negative() {
                let a = -c.clone();
                if a == rat::rat(1) {
                    write!(f, " - {v}")?;
                } else {
                    write!(f, " - {}*{v}", rat::display(&a))?;
                }
            } else if *c == rat::rat(1) {
                write!(f, " + {v}")?;
            } else {
                write!(f, " + {}*{v}", rat::display(c))?;
            }
        }
        if first {
            write!(f, "{}", rat::display(&self.constant))?;
        } else if !self.constant.is_zero() {
            if self.constant.is_negative() {
                write!(f, " - {}", rat::display(&-self.constant.clone()))?;
            } else {
                write!(f, " + {}", rat::display(&self.constant))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    #[test]
    fn arithmetic_cancels_zero_coefficients() {
        let a = Var::real("a");
        let e = LinExpr::var(a.clone()).scale(&rat(2)).add_const(&rat(3));
        let canceled = e.sub(&LinExpr::var(a).scale(&rat(2)));
        assert!(canceled.is_constant());
        assert_eq!(canceled.as_constant(), Some(&rat(3)));
    }

    #[test]
    fn eval_and_subst_agree() {
        let a = Var::real("a");
        let e = LinExpr::var(a.clone()).scale(&rat(3)).add_const(&ratio(1, 2));
        let mut map = BTreeMap::new();
        map.insert(a.clone(), LinExpr::constant(ratio(5, 3)));
        let substituted = e.subst(&map);
        assert_eq!(substituted.as_constant(), Some(&ratio(11, 2)));
        let env = |v: &Var| (v == &a).then(|| ratio(5, 3));
        assert_eq!(e.eval(&env).unwrap(), ratio(11, 2));
    }

    #[test]
    fn sort_inference() {
        let e = LinExpr::var(Var::int("x")).add_const(&rat(1));
        assert_eq!(e.sort(), Sort::Int);
        let e = e.add(&LinExpr::var(Var::real("a")));
        assert_eq!(e.sort(), Sort::Real);
        let frac = LinExpr::var(Var::int("x")).add_const(&ratio(1, 2));
        assert_eq!(frac.sort(), Sort::Real);
    }

    #[test]
    fn display_shape() {
        let e = LinExpr::var(Var::real("a"))
            .scale(&rat(2))
            .add(&LinExpr::var(Var::real("b")).neg())
            .add_const(&rat(-3));
        assert_eq!(e.to_string(), "2*a - b - 3");
        assert_eq!(LinExpr::zero().to_string(), "0");
    }
}
