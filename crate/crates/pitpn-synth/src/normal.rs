//! Normal form for reported constraints: flattened connectives with
//! branches sorted and deduplicated. Equivalence, not syntax, is the
//! contract; the normal form only makes results readable and stable.

use pitpn_core::formula::Formula;

/// Recursively flattens nested `And`/`Or`, sorts branches by their
/// rendering, and drops duplicates. Leaves atoms untouched.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::Bool(_) | Formula::Atom(..) => f.clone(),
        Formula::Not(inner) => Formula::not_(normalize(inner)),
        Formula::And(_) => {
            let mut parts = Vec::new();
            flatten_and(f, &mut parts);
            Formula::and_all(sorted(parts))
        }
        Formula::Or(_) => {
            let mut parts = Vec::new();
            flatten_or(f, &mut parts);
            Formula::or_all(sorted(parts))
        }
        Formula::Implies(a, b) => Formula::implies(normalize(a), normalize(b)),
        Formula::Exists(vars, body) => Formula::exists(vars.clone(), normalize(body)),
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    if let Formula::And(parts) = f {
        for p in parts {
            flatten_and(p, out);
        }
    } else {
        out.push(normalize(f));
    }
}

fn flatten_or(f: &Formula, out: &mut Vec<Formula>) {
    if let Formula::Or(parts) = f {
        for p in parts {
            flatten_or(p, out);
        }
    } else {
        out.push(normalize(f));
    }
}

fn sorted(mut parts: Vec<Formula>) -> Vec<Formula> {
    parts.sort_by_cached_key(|p| p.to_string());
    parts.dedup();
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use pitpn_core::expr::{LinExpr, Var};
    use pitpn_core::formula::Rel;

    fn atom(name: &str, n: i64) -> Formula {
        Formula::cmp(LinExpr::var(Var::real(name)), Rel::Ge, LinExpr::from_int(n))
    }

    #[test]
    fn flattens_sorts_and_dedupes() {
        let f = Formula::and2(
            Formula::and2(atom("b", 1), atom("a", 0)),
            Formula::and2(atom("a", 0), atom("c", 2)),
        );
        let n = normalize(&f);
        assert_eq!(n, Formula::And(vec![atom("a", 0), atom("b", 1), atom("c", 2)]));
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn single_branch_collapses() {
        let f = Formula::And(vec![atom("a", 0), atom("a", 0)]);
        assert_eq!(normalize(&f), atom("a", 0));
    }
}
