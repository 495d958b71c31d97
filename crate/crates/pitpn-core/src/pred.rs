//! State predicates: boolean templates over place tokens, transition
//! clocks, global time, and parameters. The concrete engine evaluates
//! them against ground states; the symbolic engine instantiates them
//! into formulas over a state's expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{LinExpr, Var};
use crate::formula::{Formula, Rel, Term};
use crate::marking::Marking;
use crate::net::{PlaceId, TransitionId};
use crate::rat::Rat;
use crate::CoreError;

#[derive(Debug, Clone, PartialEq)]
pub enum StatePredicate {
    Bool(bool),
    /// Every place holds at most `k` tokens.
    KSafe(u64),
    /// `tokens(place) rel expr`; the expression may mention parameters.
    Place(PlaceId, Rel, LinExpr),
    /// `clock(transition) rel expr`.
    Clock(TransitionId, Rel, LinExpr),
    /// `global time rel expr`; needs a timed state.
    GlobalTime(Rel, LinExpr),
    /// The marking equals the given constant marking exactly.
    MarkingEq(Marking),
    Not(Box<StatePredicate>),
    And(Vec<StatePredicate>),
    Or(Vec<StatePredicate>),
}

impl StatePredicate {
    pub fn tt() -> Self {
        StatePredicate::Bool(true)
    }

    pub fn ff() -> Self {
        StatePredicate::Bool(false)
    }

    pub fn not_(p: StatePredicate) -> Self {
        StatePredicate::Not(Box::new(p))
    }

    pub fn and(ps: Vec<StatePredicate>) -> Self {
        StatePredicate::And(ps)
    }

    pub fn or(ps: Vec<StatePredicate>) -> Self {
        StatePredicate::Or(ps)
    }

    pub fn place_cmp(p: impl Into<PlaceId>, rel: Rel, n: i64) -> Self {
        StatePredicate::Place(p.into(), rel, LinExpr::from_int(n))
    }

    /// Parameters appearing on comparison right-hand sides.
    pub fn params(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<Var>) {
        match self {
            StatePredicate::Bool(_)
            | StatePredicate::KSafe(_)
            | StatePredicate::MarkingEq(_) => {}
            StatePredicate::Place(_, _, e)
            | StatePredicate::Clock(_, _, e)
            | StatePredicate::GlobalTime(_, e) => e.collect_vars(out),
            StatePredicate::Not(p) => p.collect_params(out),
            StatePredicate::And(ps) | StatePredicate::Or(ps) => {
                for p in ps {
                    p.collect_params(out);
                }
            }
        }
    }

    /// Substitutes parameters in right-hand sides.
    pub fn subst_params(&self, map: &BTreeMap<Var, LinExpr>) -> StatePredicate {
        match self {
            StatePredicate::Bool(_) | StatePredicate::KSafe(_) | StatePredicate::MarkingEq(_) => {
                self.clone()
            }
            StatePredicate::Place(p, rel, e) => {
                StatePredicate::Place(p.clone(), *rel, e.subst(map))
            }
            StatePredicate::Clock(t, rel, e) => {
                StatePredicate::Clock(t.clone(), *rel, e.subst(map))
            }
            StatePredicate::GlobalTime(rel, e) => StatePredicate::GlobalTime(*rel, e.subst(map)),
            StatePredicate::Not(p) => StatePredicate::not_(p.subst_params(map)),
            StatePredicate::And(ps) => {
                StatePredicate::And(ps.iter().map(|p| p.subst_params(map)).collect())
            }
            StatePredicate::Or(ps) => {
                StatePredicate::Or(ps.iter().map(|p| p.subst_params(map)).collect())
            }
        }
    }

    /// Evaluates against a ground state. Right-hand sides must be constant
    /// (instantiate parameters first).
    pub fn eval_concrete<FM, FC>(
        &self,
        tokens: &FM,
        clock: &FC,
        global: Option<&Rat>,
    ) -> Result<bool, CoreError>
    where
        FM: Fn(&PlaceId) -> Option<Rat>,
        FC: Fn(&TransitionId) -> Option<Rat>,
    {
        match self {
            StatePredicate::Bool(b) => Ok(*b),
            StatePredicate::KSafe(_) => Err(CoreError::Invalid(
                "k-safe needs the net context; use eval_concrete_in".into(),
            )),
            StatePredicate::Place(p, rel, e) => {
                let lhs = tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                let rhs = constant(e)?;
                Ok(rel.eval(&lhs, &rhs))
            }
            StatePredicate::Clock(t, rel, e) => {
                let lhs =
                    clock(t).ok_or_else(|| CoreError::UnknownTransition(t.name().into()))?;
                let rhs = constant(e)?;
                Ok(rel.eval(&lhs, &rhs))
            }
            StatePredicate::GlobalTime(rel, e) => {
                let lhs = global.ok_or_else(|| {
                    CoreError::Invalid("global-time predicate on an untimed state".into())
                })?;
                let rhs = constant(e)?;
                Ok(rel.eval(lhs, &rhs))
            }
            StatePredicate::MarkingEq(_) => Err(CoreError::Invalid(
                "marking equality needs the net context; use eval_concrete_in".into(),
            )),
            StatePredicate::Not(p) => Ok(!p.eval_concrete(tokens, clock, global)?),
            StatePredicate::And(ps) => {
                for p in ps {
                    if !p.eval_concrete(tokens, clock, global)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StatePredicate::Or(ps) => {
                for p in ps {
                    if p.eval_concrete(tokens, clock, global)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Full concrete evaluation given the net's place list (resolves
    /// `KSafe` and `MarkingEq`).
    pub fn eval_concrete_in<FM, FC>(
        &self,
        places: &[PlaceId],
        tokens: &FM,
        clock: &FC,
        global: Option<&Rat>,
    ) -> Result<bool, CoreError>
    where
        FM: Fn(&PlaceId) -> Option<Rat>,
        FC: Fn(&TransitionId) -> Option<Rat>,
    {
        match self {
            StatePredicate::KSafe(k) => {
                let bound = Rat::from_integer(crate::rat::Int::from(*k));
                for p in places {
                    let n = tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                    if n > bound {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StatePredicate::MarkingEq(m) => {
                for p in places {
                    let want = constant(&m.get(p))?;
                    let have =
                        tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                    if want != have {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StatePredicate::Not(p) => Ok(!p.eval_concrete_in(places, tokens, clock, global)?),
            StatePredicate::And(ps) => {
                for p in ps {
                    if !p.eval_concrete_in(places, tokens, clock, global)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            StatePredicate::Or(ps) => {
                for p in ps {
                    if p.eval_concrete_in(places, tokens, clock, global)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            simple => simple.eval_concrete(tokens, clock, global),
        }
    }

    /// Instantiates the predicate into a formula over a state's symbolic
    /// entries. `tokens`/`clock` give each place/transition expression;
    /// `global` is the global-clock expression when present.
    pub fn to_formula<FM, FC>(
        &self,
        places: &[PlaceId],
        tokens: &FM,
        clock: &FC,
        global: Option<&LinExpr>,
    ) -> Result<Formula, CoreError>
    where
        FM: Fn(&PlaceId) -> Option<LinExpr>,
        FC: Fn(&TransitionId) -> Option<Term>,
    {
        match self {
            StatePredicate::Bool(b) => Ok(Formula::Bool(*b)),
            StatePredicate::KSafe(k) => {
                let bound = LinExpr::from_int(*k as i64);
                let mut conj = Vec::new();
                for p in places {
                    let e = tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                    conj.push(Formula::cmp(e, Rel::Le, bound.clone()));
                }
                Ok(Formula::and_all(conj))
            }
            StatePredicate::Place(p, rel, rhs) => {
                let e = tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                Ok(Formula::cmp(e, *rel, rhs.clone()))
            }
            StatePredicate::Clock(t, rel, rhs) => {
                let e = clock(t).ok_or_else(|| CoreError::UnknownTransition(t.name().into()))?;
                Ok(Formula::atom(e, *rel, Term::Lin(rhs.clone())))
            }
            StatePredicate::GlobalTime(rel, rhs) => {
                let e = global.ok_or_else(|| {
                    CoreError::Invalid("global-time predicate on an untimed state".into())
                })?;
                Ok(Formula::cmp(e.clone(), *rel, rhs.clone()))
            }
            StatePredicate::MarkingEq(m) => {
                let mut conj = Vec::new();
                for p in places {
                    let e = tokens(p).ok_or_else(|| CoreError::UnknownPlace(p.name().into()))?;
                    conj.push(Formula::cmp(e, Rel::Eq, m.get(p)));
                }
                Ok(Formula::and_all(conj))
            }
            StatePredicate::Not(p) => Ok(Formula::not_(p.to_formula(places, tokens, clock, global)?)),
            StatePredicate::And(ps) => {
                let parts: Result<Vec<_>, _> = ps
                    .iter()
                    .map(|p| p.to_formula(places, tokens, clock, global))
                    .collect();
                Ok(Formula::and_all(parts?))
            }
            StatePredicate::Or(ps) => {
                let parts: Result<Vec<_>, _> = ps
                    .iter()
                    .map(|p| p.to_formula(places, tokens, clock, global))
                    .collect();
                Ok(Formula::or_all(parts?))
            }
        }
    }
}

fn constant(e: &LinExpr) -> Result<Rat, CoreError> {
    e.as_constant()
        .cloned()
        .ok_or_else(|| CoreError::NonConstant(e.to_string()))
}

impl fmt::Display for StatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePredicate::Bool(b) => write!(f, "{b}"),
            StatePredicate::KSafe(k) => write!(f, "k-safe({k})"),
            StatePredicate::Place(p, rel, e) => write!(f, "{p} {} {e}", rel.symbol()),
            StatePredicate::Clock(t, rel, e) => write!(f, "clock({t}) {} {e}", rel.symbol()),
            StatePredicate::GlobalTime(rel, e) => write!(f, "gt {} {e}", rel.symbol()),
            StatePredicate::MarkingEq(m) => write!(f, "marking = [{m}]"),
            StatePredicate::Not(p) => write!(f, "not ({p})"),
            StatePredicate::And(ps) => join(f, ps, "and"),
            StatePredicate::Or(ps) => join(f, ps, "or"),
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, ps: &[StatePredicate], op: &str) -> fmt::Result {
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        write!(f, "({p})")?;
    }
    Ok(())
}
