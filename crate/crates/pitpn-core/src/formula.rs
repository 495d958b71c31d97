//! First-order linear-arithmetic formulas with if-then-else terms and
//! existential quantifier blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{LinExpr, Var};
use crate::rat::Rat;
use crate::CoreError;

/// Comparison relations between terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn eval(self, l: &Rat, r: &Rat) -> bool {
        match self {
            Rel::Lt => l < r,
            Rel::Le => l <= r,
            Rel::Eq => l == r,
            Rel::Ge => l >= r,
            Rel::Gt => l > r,
        }
    }

    /// Relation of the negated atom: not (l < r) iff l >= r.
    pub fn negated(self) -> Option<Rel> {
        match self {
            Rel::Lt => Some(Rel::Ge),
            Rel::Le => Some(Rel::Gt),
            Rel::Ge => Some(Rel::Lt),
            Rel::Gt => Some(Rel::Le),
            Rel::Eq => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// An arithmetic term: a linear expression or an if-then-else tree whose
/// leaves are linear expressions. Clock updates in the symbolic engine
/// produce nested ITE terms; they are kept unexpanded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Lin(LinExpr),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

impl Term {
    pub fn zero() -> Self {
        Term::Lin(LinExpr::zero())
    }

    pub fn lin(e: LinExpr) -> Self {
        Term::Lin(e)
    }

    pub fn var(v: Var) -> Self {
        Term::Lin(LinExpr::var(v))
    }

    /// ITE constructor that folds constant conditions.
    pub fn ite(cond: Formula, then: Term, els: Term) -> Self {
        match cond {
            Formula::Bool(true) => then,
            Formula::Bool(false) => els,
            c => {
                if then == els {
                    then
                } else {
                    Term::Ite(Box::new(c), Box::new(then), Box::new(els))
                }
            }
        }
    }

    pub fn as_lin(&self) -> Option<&LinExpr> {
        match self {
            Term::Lin(e) => Some(e),
            Term::Ite(..) => None,
        }
    }

    pub fn as_constant(&self) -> Option<&Rat> {
        self.as_lin().and_then(|e| e.as_constant())
    }

    /// Adds a linear expression, pushing it into ITE branches.
    pub fn add_lin(&self, e: &LinExpr) -> Term {
        match self {
            Term::Lin(l) => Term::Lin(l.add(e)),
            Term::Ite(c, t, f) => {
                Term::Ite(c.clone(), Box::new(t.add_lin(e)), Box::new(f.add_lin(e)))
            }
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Lin(e) => e.collect_vars(out),
            Term::Ite(c, t, f) => {
                c.collect_free_vars(out, &mut Vec::new());
                t.collect_vars(out);
                f.collect_vars(out);
            }
        }
    }

    pub fn eval<F>(&self, env: &F) -> Result<Rat, CoreError>
    where
        F: Fn(&Var) -> Option<Rat>,
    {
        match self {
            Term::Lin(e) => e.eval(env),
            Term::Ite(c, t, f) => {
                if c.eval(env)? {
                    t.eval(env)
                } else {
                    f.eval(env)
                }
            }
        }
    }

    pub fn subst(&self, map: &BTreeMap<Var, LinExpr>) -> Term {
        match self {
            Term::Lin(e) => Term::Lin(e.subst(map)),
            Term::Ite(c, t, f) => Term::ite(c.subst(map), t.subst(map), f.subst(map)),
        }
    }
}

impl From<LinExpr> for Term {
    fn from(e: LinExpr) -> Self {
        Term::Lin(e)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Lin(e) => write!(f, "{e}"),
            Term::Ite(c, t, e) => write!(f, "(if {c} then {t} else {e})"),
        }
    }
}

/// Quantifier-free core plus existential blocks. Atoms compare terms;
/// smart constructors fold constants eagerly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bool(bool),
    Atom(Term, Rel, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn tt() -> Self {
        Formula::Bool(true)
    }

    pub fn ff() -> Self {
        Formula::Bool(false)
    }

    /// Atom over arbitrary terms; folds to a boolean when both sides are
    /// constant linear expressions.
    pub fn atom(lhs: Term, rel: Rel, rhs: Term) -> Self {
        if let (Some(l), Some(r)) = (lhs.as_constant(), rhs.as_constant()) {
            return Formula::Bool(rel.eval(l, r));
        }
        Formula::Atom(lhs, rel, rhs)
    }

    /// Atom over linear expressions.
    pub fn cmp(lhs: LinExpr, rel: Rel, rhs: LinExpr) -> Self {
        Formula::atom(Term::Lin(lhs), rel, Term::Lin(rhs))
    }

    pub fn not_(f: Formula) -> Self {
        match f {
            Formula::Bool(b) => Formula::Bool(!b),
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// N-ary conjunction; flattens nested conjunctions and folds constants.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::Bool(true) => {}
                Formula::Bool(false) => return Formula::ff(),
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::tt(),
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn and2(a: Formula, b: Formula) -> Self {
        Formula::and_all([a, b])
    }

    /// N-ary disjunction; flattens and folds.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::Bool(false) => {}
                Formula::Bool(true) => return Formula::tt(),
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::ff(),
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn or2(a: Formula, b: Formula) -> Self {
        Formula::or_all([a, b])
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        match (a, b) {
            (Formula::Bool(true), b) => b,
            (Formula::Bool(false), _) => Formula::tt(),
            (_, Formula::Bool(true)) => Formula::tt(),
            (a, Formula::Bool(false)) => Formula::not_(a),
            (a, b) => Formula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and2(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// Existential block; skipped when the variable list is empty.
    pub fn exists(vars: Vec<Var>, body: Formula) -> Self {
        if vars.is_empty() || matches!(body, Formula::Bool(_)) {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Bool(_) | Formula::Atom(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out, &mut Vec::new());
        out
    }

    pub(crate) fn collect_free_vars(&self, out: &mut BTreeSet<Var>, bound: &mut Vec<Var>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Atom(l, _, r) => {
                let mut vars = BTreeSet::new();
                l.collect_vars(&mut vars);
                r.collect_vars(&mut vars);
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free_vars(out, bound),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free_vars(out, bound);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free_vars(out, bound);
                b.collect_free_vars(out, bound);
            }
            Formula::Exists(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().cloned());
                body.collect_free_vars(out, bound);
                bound.truncate(n);
            }
        }
    }

    /// Evaluates a quantifier-free formula under a total environment.
    pub fn eval<F>(&self, env: &F) -> Result<bool, CoreError>
    where
        F: Fn(&Var) -> Option<Rat>,
    {
        match self {
            Formula::Bool(b) => Ok(*b),
            Formula::Atom(l, rel, r) => Ok(rel.eval(&l.eval(env)?, &r.eval(env)?)),
            Formula::Not(f) => Ok(!f.eval(env)?),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(a, b) => Ok(!a.eval(env)? || b.eval(env)?),
            Formula::Exists(..) => Err(CoreError::QuantifiedEval),
        }
    }

    /// Substitutes free variables by linear expressions. The substitution
    /// must not mention bound variables; fresh-name discipline guarantees
    /// this for all internal uses.
    pub fn subst(&self, map: &BTreeMap<Var, LinExpr>) -> Formula {
        match self {
            Formula::Bool(b) => Formula::Bool(*b),
            Formula::Atom(l, rel, r) => Formula::atom(l.subst(map), *rel, r.subst(map)),
            Formula::Not(f) => Formula::not_(f.subst(map)),
            Formula::And(fs) => Formula::and_all(fs.iter().map(|f| f.subst(map))),
            Formula::Or(fs) => Formula::or_all(fs.iter().map(|f| f.subst(map))),
            Formula::Implies(a, b) => Formula::implies(a.subst(map), b.subst(map)),
            Formula::Exists(vars, body) => {
                debug_assert!(vars.iter().all(|v| !map.contains_key(v)));
                debug_assert!(vars
                    .iter()
                    .all(|v| map.values().all(|e| !e.terms.contains_key(v))));
                Formula::exists(vars.clone(), body.subst(map))
            }
        }
    }

    /// Renames free variables. Unlike `subst` this maps variables to
    /// variables and is used by projection.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Formula {
        let lin: BTreeMap<Var, LinExpr> = map
            .iter()
            .map(|(from, to)| (from.clone(), LinExpr::var(to.clone())))
            .collect();
        self.subst(&lin)
    }

    /// Expands all ITE terms by case splitting. Exponential in the ITE
    /// nesting depth; used only by tests and the brute-force oracles.
    pub fn expand_ite(&self) -> Formula {
        match self {
            Formula::Bool(b) => Formula::Bool(*b),
            Formula::Atom(l, rel, r) => expand_atom(l, *rel, r),
            Formula::Not(f) => Formula::not_(f.expand_ite()),
            Formula::And(fs) => Formula::and_all(fs.iter().map(|f| f.expand_ite())),
            Formula::Or(fs) => Formula::or_all(fs.iter().map(|f| f.expand_ite())),
            Formula::Implies(a, b) => Formula::implies(a.expand_ite(), b.expand_ite()),
            Formula::Exists(vars, body) => Formula::exists(vars.clone(), body.expand_ite()),
        }
    }
}

fn expand_atom(l: &Term, rel: Rel, r: &Term) -> Formula {
    match (l, r) {
        (Term::Ite(c, t, f), _) => {
            let c = c.expand_ite();
            Formula::or2(
                Formula::and2(c.clone(), expand_atom(t, rel, r)),
                Formula::and2(Formula::not_(c), expand_atom(f, rel, r)),
            )
        }
        (Term::Lin(_), Term::Ite(c, t, f)) => {
            let c = c.expand_ite();
            Formula::or2(
                Formula::and2(c.clone(), expand_atom(l, rel, t)),
                Formula::and2(Formula::not_(c), expand_atom(l, rel, f)),
            )
        }
        (Term::Lin(a), Term::Lin(b)) => Formula::cmp(a.clone(), rel, b.clone()),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bool(b) => write!(f, "{b}"),
            Formula::Atom(l, rel, r) => write!(f, "{l} {} {r}", rel.symbol()),
            Formula::Not(inner) => write!(f, "not ({inner})"),
            Formula::And(fs) => join(f, fs, "and"),
            Formula::Or(fs) => join(f, fs, "or"),
            Formula::Implies(a, b) => write!(f, "({a}) => ({b})"),
            Formula::Exists(vars, body) => {
                write!(f, "exists ")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}:{}", v.name, v.sort)?;
                }
                write!(f, " . ({body})")
            }
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str) -> fmt::Result {
    for (i, sub) in fs.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        write!(f, "({sub})")?;
    }
    Ok(())
}
