//! Rendering of core formulas and terms as SMT-LIB2 text.
//!
//! Printing is strict about sorts: whenever an atom mixes integer and
//! real operands, integer variables are wrapped in `to_real` and
//! constants are printed as real literals, so the output is accepted by
//! solvers that reject implicit coercion.

use num_traits::{Signed, Zero};

use pitpn_core::expr::{LinExpr, Sort, Var};
use pitpn_core::formula::{Formula, Term};
use pitpn_core::rat::Rat;

/// SMT-LIB2 rendering of a formula.
pub fn formula(f: &Formula) -> String {
    match f {
        Formula::Bool(true) => "true".into(),
        Formula::Bool(false) => "false".into(),
        Formula::Atom(l, rel, r) => {
            let sort = join_sort(term_sort(l), term_sort(r));
            format!("({} {} {})", rel.symbol(), term(l, sort), term(r, sort))
        }
        Formula::Not(inner) => format!("(not {})", formula(inner)),
        Formula::And(fs) => nary("and", fs),
        Formula::Or(fs) => nary("or", fs),
        Formula::Implies(a, b) => format!("(=> {} {})", formula(a), formula(b)),
        Formula::Exists(vars, body) => {
            let binders: Vec<String> = vars
                .iter()
                .map(|v| format!("({} {})", symbol(&v.name), v.sort))
                .collect();
            format!("(exists ({}) {})", binders.join(" "), formula(body))
        }
    }
}

/// One `declare-fun` line per variable, in iteration order.
pub fn declarations<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Vec<String> {
    vars.into_iter()
        .map(|v| format!("(declare-fun {} () {})", symbol(&v.name), v.sort))
        .collect()
}

/// A complete standalone script: declarations, one assertion, check-sat.
/// Used by reports to record the exact constraint that was solved.
pub fn script(f: &Formula) -> String {
    let mut lines = declarations(f.free_vars().iter().collect::<Vec<_>>());
    lines.push(format!("(assert {})", formula(f)));
    lines.push("(check-sat)".into());
    lines.join("\n")
}

/// Quotes a name as an SMT-LIB2 symbol when needed. Names produced by
/// the engine may contain `#`, which is only legal inside `|...|`.
pub fn symbol(name: &str) -> String {
    if is_simple_symbol(name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

pub(crate) fn term_sort(t: &Term) -> Sort {
    match t {
        Term::Lin(e) => e.sort(),
        Term::Ite(_, a, b) => join_sort(term_sort(a), term_sort(b)),
    }
}

fn join_sort(a: Sort, b: Sort) -> Sort {
    if a == Sort::Real || b == Sort::Real {
        Sort::Real
    } else {
        Sort::Int
    }
}

fn nary(op: &str, fs: &[Formula]) -> String {
    let parts: Vec<String> = fs.iter().map(formula).collect();
    format!("({op} {})", parts.join(" "))
}

fn term(t: &Term, sort: Sort) -> String {
    match t {
        Term::Lin(e) => lin(e, sort),
        Term::Ite(c, a, b) => {
            format!("(ite {} {} {})", formula(c), term(a, sort), term(b, sort))
        }
    }
}

fn lin(e: &LinExpr, sort: Sort) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, c) in &e.terms {
        let var = var_ref(v, sort);
        if c == &pitpn_core::rat::one() {
            parts.push(var);
        } else {
            parts.push(format!("(* {} {var})", rat_lit(c, sort)));
        }
    }
    if parts.is_empty() || !e.constant.is_zero() {
        parts.push(rat_lit(&e.constant, sort));
    }
    match parts.len() {
        1 => parts.pop().unwrap(),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

fn var_ref(v: &Var, sort: Sort) -> String {
    let name = symbol(&v.name);
    if v.sort == Sort::Int && sort == Sort::Real {
        format!("(to_real {name})")
    } else {
        name
    }
}

fn rat_lit(r: &Rat, sort: Sort) -> String {
    let body = if sort == Sort::Int && r.is_integer() {
        r.numer().magnitude().to_string()
    } else if r.is_integer() {
        format!("{}.0", r.numer().magnitude())
    } else {
        format!("(/ {}.0 {}.0)", r.numer().magnitude(), r.denom().magnitude())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn is_simple_symbol(name: &str) -> bool {
    const RESERVED: &[&str] = &[
        "true", "false", "let", "exists", "forall", "as", "par", "assert", "ite", "and", "or",
        "not", "xor", "distinct", "_", "!",
    ];
    if name.is_empty() || RESERVED.contains(&name) {
        return false;
    }
    let extra = "~!@$%^&*_-+=<>.?/";
    let mut chars = name.chars();
    let first = chars.next().unwrap();
    if !(first.is_ascii_alphabetic() || extra.contains(first)) {
        return false;
    }
    name.chars()
        .all(|c| c.is_ascii_alphanumeric() || extra.contains(c))
}
