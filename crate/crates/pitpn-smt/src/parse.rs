//! Parsing solver output back into core types: rational values, models,
//! and the quantifier-free formulas returned by quantifier elimination.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use pitpn_core::expr::{LinExpr, Sort, Var};
use pitpn_core::formula::{Formula, Rel};
use pitpn_core::rat::{self, Rat};

use crate::sexpr::Sexpr;
use crate::SmtError;

/// A satisfying assignment. Variables the solver omitted are don't-care
/// and default to zero on lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    values: BTreeMap<Var, Rat>,
}

impl Model {
    pub fn new(values: BTreeMap<Var, Rat>) -> Self {
        Model { values }
    }

    pub fn get(&self, v: &Var) -> Option<&Rat> {
        self.values.get(v)
    }

    pub fn value_or_zero(&self, v: &Var) -> Rat {
        self.values.get(v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Rat)> {
        self.values.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, r) in &self.values {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{} = {}", v.name, rat::display(r))?;
            first = false;
        }
        Ok(())
    }
}

/// Table of declared variables, keyed by plain (unquoted) name.
pub(crate) type SymbolTable = BTreeMap<String, Var>;

pub(crate) fn symbol_table<'a>(vars: impl IntoIterator<Item = &'a Var>) -> SymbolTable {
    vars.into_iter()
        .map(|v| (v.name.clone(), v.clone()))
        .collect()
}

/// Parses a numeric literal: numerals, decimals, unary minus, division
/// of literals, and `to_real` wrappers.
pub(crate) fn parse_value(sx: &Sexpr) -> Result<Rat, SmtError> {
    match sx {
        Sexpr::Atom(_) => {
            let text = sx.symbol().unwrap();
            rat::parse(text)
                .ok_or_else(|| SmtError::Parse(format!("not a numeric literal: {text}")))
        }
        Sexpr::List(items) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| SmtError::Parse(format!("not a value: {sx}")))?;
            match (head, items.len()) {
                ("-", 2) => Ok(-parse_value(&items[1])?),
                ("/", 3) => {
                    let n = parse_value(&items[1])?;
                    let d = parse_value(&items[2])?;
                    if d.is_zero() {
                        return Err(SmtError::Parse("division by zero in value".into()));
                    }
                    Ok(n / d)
                }
                ("to_real", 2) => parse_value(&items[1]),
                _ => Err(SmtError::Parse(format!("not a value: {sx}"))),
            }
        }
    }
}

/// Parses a `get-model` response. Entries for unknown symbols and for
/// defined functions with arguments are ignored.
pub(crate) fn parse_model(sx: &Sexpr, table: &SymbolTable) -> Result<Model, SmtError> {
    let items = sx
        .list()
        .ok_or_else(|| SmtError::Parse(format!("not a model: {sx}")))?;
    let defs = match items.first().and_then(|h| h.atom()) {
        Some("model") => &items[1..],
        _ => items,
    };
    let mut values = BTreeMap::new();
    for def in defs {
        let Some(parts) = def.list() else { continue };
        if parts.len() != 5 || parts[0].atom() != Some("define-fun") {
            continue;
        }
        if parts[2].list().map(|args| !args.is_empty()).unwrap_or(true) {
            continue;
        }
        let Some(name) = parts[1].symbol() else { continue };
        let Some(var) = table.get(name) else { continue };
        let value = parse_value(&parts[4])?;
        if var.sort == Sort::Int && !value.is_integer() {
            return Err(SmtError::Parse(format!(
                "integer variable {name} was assigned {value}"
            )));
        }
        values.insert(var.clone(), value);
    }
    Ok(Model { values })
}

/// Binding environment for `let` forms. SMT-LIB2 `let` is parallel:
/// all bound values are read in the enclosing environment.
#[derive(Clone, Default)]
struct Bindings {
    exprs: BTreeMap<String, LinExpr>,
    formulas: BTreeMap<String, Formula>,
}

/// Parses the response of `(apply ...)`: a `goals` list whose goals each
/// hold a conjunction of formulas followed by keyword annotations. The
/// result is the disjunction over goals.
pub(crate) fn parse_goals(sx: &Sexpr, table: &SymbolTable) -> Result<Formula, SmtError> {
    let items = sx
        .list()
        .ok_or_else(|| SmtError::Parse(format!("not a goals response: {sx}")))?;
    if items.first().and_then(|h| h.atom()) != Some("goals") {
        return Err(SmtError::Parse(format!("not a goals response: {sx}")));
    }
    let mut goals = Vec::new();
    for goal in &items[1..] {
        let parts = goal
            .list()
            .ok_or_else(|| SmtError::Parse(format!("not a goal: {goal}")))?;
        if parts.first().and_then(|h| h.atom()) != Some("goal") {
            return Err(SmtError::Parse(format!("not a goal: {goal}")));
        }
        let mut conjuncts = Vec::new();
        let mut i = 1;
        while i < parts.len() {
            if parts[i].atom().is_some_and(|a| a.starts_with(':')) {
                i += 2;
                continue;
            }
            conjuncts.push(parse_formula(&parts[i], table)?);
            i += 1;
        }
        goals.push(Formula::and_all(conjuncts));
    }
    Ok(Formula::or_all(goals))
}

/// Parses a quantifier-free formula from solver output.
pub(crate) fn parse_formula(sx: &Sexpr, table: &SymbolTable) -> Result<Formula, SmtError> {
    formula_in(sx, table, &Bindings::default())
}

fn formula_in(sx: &Sexpr, table: &SymbolTable, env: &Bindings) -> Result<Formula, SmtError> {
    match sx {
        Sexpr::Atom(_) => {
            let name = sx.symbol().unwrap();
            match name {
                "true" => Ok(Formula::tt()),
                "false" => Ok(Formula::ff()),
                _ => env
                    .formulas
                    .get(name)
                    .cloned()
                    .ok_or_else(|| SmtError::Parse(format!("expected a formula, got {name}"))),
            }
        }
        Sexpr::List(items) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| SmtError::Parse(format!("expected a formula, got {sx}")))?;
            let args = &items[1..];
            match head {
                "and" => Ok(Formula::and_all(
                    args.iter()
                        .map(|a| formula_in(a, table, env))
                        .collect::<Result<Vec<_>, _>>()?,
                )),
                "or" => Ok(Formula::or_all(
                    args.iter()
                        .map(|a| formula_in(a, table, env))
                        .collect::<Result<Vec<_>, _>>()?,
                )),
                "not" if args.len() == 1 => {
                    Ok(Formula::not_(formula_in(&args[0], table, env)?))
                }
                "=>" if args.len() >= 2 => {
                    let mut parsed = args
                        .iter()
                        .map(|a| formula_in(a, table, env))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut acc = parsed.pop().unwrap();
                    while let Some(lhs) = parsed.pop() {
                        acc = Formula::implies(lhs, acc);
                    }
                    Ok(acc)
                }
                "<" | "<=" | ">=" | ">" => chain_atoms(head, args, table, env),
                "=" => {
                    // Arithmetic equality, or propositional iff as fallback.
                    match chain_atoms(head, args, table, env) {
                        Ok(f) => Ok(f),
                        Err(e @ SmtError::Unsupported(_)) => Err(e),
                        Err(_) => {
                            let parsed = args
                                .iter()
                                .map(|a| formula_in(a, table, env))
                                .collect::<Result<Vec<_>, _>>()?;
                            Ok(Formula::and_all(
                                parsed.windows(2).map(|w| Formula::iff(w[0].clone(), w[1].clone())),
                            ))
                        }
                    }
                }
                "distinct" if args.len() == 2 => {
                    let l = expr_in(&args[0], table, env)?;
                    let r = expr_in(&args[1], table, env)?;
                    Ok(Formula::not_(Formula::cmp(l, Rel::Eq, r)))
                }
                "ite" if args.len() == 3 => {
                    let c = formula_in(&args[0], table, env)?;
                    let t = formula_in(&args[1], table, env)?;
                    let e = formula_in(&args[2], table, env)?;
                    Ok(Formula::or2(
                        Formula::and2(c.clone(), t),
                        Formula::and2(Formula::not_(c), e),
                    ))
                }
                "let" if args.len() == 2 => {
                    let extended = bind_let(&args[0], table, env)?;
                    formula_in(&args[1], table, &extended)
                }
                "exists" | "forall" => Err(SmtError::Parse(
                    "solver output still contains a quantifier".into(),
                )),
                _ => Err(SmtError::Parse(format!("unknown formula head: {head}"))),
            }
        }
    }
}

fn chain_atoms(
    op: &str,
    args: &[Sexpr],
    table: &SymbolTable,
    env: &Bindings,
) -> Result<Formula, SmtError> {
    if args.len() < 2 {
        return Err(SmtError::Parse(format!("relation {op} needs two operands")));
    }
    let rel = match op {
        "<" => Rel::Lt,
        "<=" => Rel::Le,
        ">=" => Rel::Ge,
        ">" => Rel::Gt,
        "=" => Rel::Eq,
        _ => unreachable!(),
    };
    let exprs = args
        .iter()
        .map(|a| expr_in(a, table, env))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Formula::and_all(
        exprs
            .windows(2)
            .map(|w| Formula::cmp(w[0].clone(), rel, w[1].clone())),
    ))
}

fn bind_let(
    bindings: &Sexpr,
    table: &SymbolTable,
    env: &Bindings,
) -> Result<Bindings, SmtError> {
    let pairs = bindings
        .list()
        .ok_or_else(|| SmtError::Parse("malformed let bindings".into()))?;
    let mut extended = env.clone();
    for pair in pairs {
        let items = pair
            .list()
            .filter(|items| items.len() == 2)
            .ok_or_else(|| SmtError::Parse("malformed let binding".into()))?;
        let name = items[0]
            .symbol()
            .ok_or_else(|| SmtError::Parse("let binding without a name".into()))?;
        // Values are read in the enclosing environment (parallel let).
        match expr_in(&items[1], table, env) {
            Ok(e) => {
                extended.exprs.insert(name.to_string(), e);
            }
            Err(_) => {
                let f = formula_in(&items[1], table, env)?;
                extended.formulas.insert(name.to_string(), f);
            }
        }
    }
    Ok(extended)
}

fn expr_in(sx: &Sexpr, table: &SymbolTable, env: &Bindings) -> Result<LinExpr, SmtError> {
    match sx {
        Sexpr::Atom(_) => {
            let name = sx.symbol().unwrap();
            if let Some(r) = rat::parse(name) {
                return Ok(LinExpr::constant(r));
            }
            if let Some(e) = env.exprs.get(name) {
                return Ok(e.clone());
            }
            table
                .get(name)
                .map(|v| LinExpr::var(v.clone()))
                .ok_or_else(|| SmtError::Parse(format!("unknown symbol: {name}")))
        }
        Sexpr::List(items) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| SmtError::Parse(format!("expected a term, got {sx}")))?;
            let args = &items[1..];
            let parsed = |i: usize| expr_in(&args[i], table, env);
            match head {
                "+" => {
                    let mut acc = LinExpr::zero();
                    for a in args {
                        acc = acc.add(&expr_in(a, table, env)?);
                    }
                    Ok(acc)
                }
                "-" if args.len() == 1 => Ok(parsed(0)?.neg()),
                "-" if args.len() >= 2 => {
                    let mut acc = parsed(0)?;
                    for a in &args[1..] {
                        acc = acc.sub(&expr_in(a, table, env)?);
                    }
                    Ok(acc)
                }
                "*" if !args.is_empty() => {
                    let mut coeff = pitpn_core::rat::one();
                    let mut var_part: Option<LinExpr> = None;
                    for a in args {
                        let e = expr_in(a, table, env)?;
                        match e.as_constant() {
                            Some(c) => coeff *= c,
                            None if var_part.is_none() => var_part = Some(e),
                            None => {
                                return Err(SmtError::Parse(format!(
                                    "nonlinear product in solver output: {sx}"
                                )))
                            }
                        }
                    }
                    Ok(match var_part {
                        Some(e) => e.scale(&coeff),
                        None => LinExpr::constant(coeff),
                    })
                }
                "/" if args.len() == 2 => {
                    let num = parsed(0)?;
                    let den = parsed(1)?;
                    let d = den.as_constant().cloned().ok_or_else(|| {
                        SmtError::Parse(format!("division by a variable: {sx}"))
                    })?;
                    if d.is_zero() {
                        return Err(SmtError::Parse("division by zero".into()));
                    }
                    Ok(num.scale(&d.recip()))
                }
                "to_real" if args.len() == 1 => parsed(0),
                "let" if args.len() == 2 => {
                    let extended = bind_let(&args[0], table, env)?;
                    expr_in(&args[1], table, &extended)
                }
                "mod" | "div" => Err(SmtError::Unsupported(
                    "integer divisibility constraints in solver output have no linear form"
                        .into(),
                )),
                _ => Err(SmtError::Parse(format!("unknown term head: {head}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;
    use pitpn_core::rat::{rat, ratio};

    fn table() -> SymbolTable {
        let vars = [Var::real("a"), Var::real("b"), Var::int("x"), Var::real("#c-t1")];
        vars.iter().map(|v| (v.name.clone(), v.clone())).collect()
    }

    #[test]
    fn values_in_all_shapes() {
        for (text, expect) in [
            ("5", rat(5)),
            ("5.0", rat(5)),
            ("(- 5)", rat(-5)),
            ("(/ 5.0 12.0)", ratio(5, 12)),
            ("(- (/ 7.0 2.0))", ratio(-7, 2)),
            ("(to_real 3)", rat(3)),
        ] {
            assert_eq!(parse_value(&parse_one(text).unwrap()).unwrap(), expect, "{text}");
        }
        assert!(parse_value(&parse_one("foo").unwrap()).is_err());
    }

    #[test]
    fn model_with_wrapper_and_quoted_names() {
        let sx = parse_one(
            "(model (define-fun a () Real (/ 5.0 12.0)) \
             (define-fun |#c-t1| () Real 2.0) \
             (define-fun x () Int (- 3)) \
             (define-fun skolem ((y Real)) Real y))",
        )
        .unwrap();
        let m = parse_model(&sx, &table()).unwrap();
        assert_eq!(m.get(&Var::real("a")), Some(&ratio(5, 12)));
        assert_eq!(m.get(&Var::real("#c-t1")), Some(&rat(2)));
        assert_eq!(m.get(&Var::int("x")), Some(&rat(-3)));
        assert_eq!(m.value_or_zero(&Var::real("b")), rat(0));
    }

    #[test]
    fn fractional_integer_assignment_is_rejected() {
        let sx = parse_one("((define-fun x () Int (/ 1.0 2.0)))").unwrap();
        assert!(parse_model(&sx, &table()).is_err());
    }

    #[test]
    fn goals_become_disjunctions_of_conjunctions() {
        let sx = parse_one(
            "(goals (goal (>= b 60.0) (<= b 96.0) :precision precise :depth 1))",
        )
        .unwrap();
        let f = parse_goals(&sx, &table()).unwrap();
        let b = LinExpr::var(Var::real("b"));
        let expect = Formula::and2(
            Formula::cmp(b.clone(), Rel::Ge, LinExpr::from_int(60)),
            Formula::cmp(b, Rel::Le, LinExpr::from_int(96)),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn empty_goal_is_true_and_false_goal_is_false() {
        let sx = parse_one("(goals (goal :precision precise :depth 1))").unwrap();
        assert_eq!(parse_goals(&sx, &table()).unwrap(), Formula::tt());
        let sx = parse_one("(goals (goal false :precision precise :depth 1))").unwrap();
        assert_eq!(parse_goals(&sx, &table()).unwrap(), Formula::ff());
    }

    #[test]
    fn let_bindings_are_parallel() {
        // The inner `a!0` must refer to the outer binding, not itself.
        let sx = parse_one(
            "(let ((a!0 (+ a 1.0))) (let ((a!0 (+ a!0 1.0))) (>= a!0 0.0)))",
        )
        .unwrap();
        let f = parse_formula(&sx, &table()).unwrap();
        let expect = Formula::cmp(
            LinExpr::var(Var::real("a")).add_const(&rat(2)),
            Rel::Ge,
            LinExpr::zero(),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn arithmetic_shapes() {
        let sx = parse_one("(<= (* 3.0 a) (- b (* 2.0 a) 1.0))").unwrap();
        let f = parse_formula(&sx, &table()).unwrap();
        let lhs = LinExpr::var(Var::real("a")).scale(&rat(3));
        let rhs = LinExpr::var(Var::real("b"))
            .sub(&LinExpr::var(Var::real("a")).scale(&rat(2)))
            .add_const(&rat(-1));
        assert_eq!(f, Formula::cmp(lhs, Rel::Le, rhs));
        let sx = parse_one("(* a b)").unwrap();
        assert!(parse_formula(&parse_one("(>= (* a b) 0.0)").unwrap(), &table()).is_err());
        drop(sx);
    }

    #[test]
    fn quantified_output_is_rejected() {
        let sx = parse_one("(exists ((y Real)) (>= y 0.0))").unwrap();
        assert!(parse_formula(&sx, &table()).is_err());
    }
}
