//! Structural and semantic diagnostics for nets.

use num_traits::Signed;

use crate::formula::{Formula, Rel};
use crate::net::{Net, TimeBound};

/// Verdict of an external satisfiability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatVerdict {
    Sat,
    Unsat,
    Unknown,
}

/// Callback used by semantic checks; implemented by the SMT backend.
/// Without an oracle only constant formulas are decided.
pub trait SatOracle {
    fn check_sat_formula(&mut self, f: &Formula) -> SatVerdict;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    EmptyNet,
    UnsatInitConstraint,
    EmptyInterval,
    NegativeBound,
    NegativeInitialMarking,
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub detail: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

fn diag(kind: DiagnosticKind, detail: impl Into<String>) -> Diagnostic {
    Diagnostic { kind, detail: detail.into() }
}

impl Net {
    /// Reports structural defects that `build` cannot rule out:
    /// emptiness, an unsatisfiable initial constraint, negative constants,
    /// and intervals that the initial constraint forces empty or negative.
    /// Parametric conditions are decided through the oracle when provided,
    /// otherwise only constant cases are reported.
    pub fn validate(&self, mut oracle: Option<&mut dyn SatOracle>) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.places().is_empty() || self.transitions().is_empty() {
            out.push(diag(
                DiagnosticKind::EmptyNet,
                "a net needs at least one place and one transition",
            ));
        }

        let k0 = self.init_constraint().clone();
        let mut possible = |f: &Formula| -> Option<bool> {
            match f {
                Formula::Bool(b) => Some(*b),
                _ => match oracle.as_deref_mut() {
                    Some(o) => match o.check_sat_formula(f) {
                        SatVerdict::Sat => Some(true),
                        SatVerdict::Unsat => Some(false),
                        SatVerdict::Unknown => None,
                    },
                    None => None,
                },
            }
        };

        if possible(&k0) == Some(false) {
            out.push(diag(
                DiagnosticKind::UnsatInitConstraint,
                "the initial constraint is unsatisfiable",
            ));
        }

        for t in self.transitions() {
            let lo = &t.interval.lo;
            if let Some(c) = lo.as_constant() {
                if c.is_negative() {
                    out.push(diag(
                        DiagnosticKind::NegativeBound,
                        format!("{}: lower bound {} is negative", t.id, c),
                    ));
                }
            } else {
                let nonneg = Formula::and2(
                    k0.clone(),
                    Formula::cmp(lo.clone(), Rel::Ge, 0.into()),
                );
                if possible(&nonneg) == Some(false) {
                    out.push(diag(
                        DiagnosticKind::NegativeBound,
                        format!("{}: lower bound is negative under the initial constraint", t.id),
                    ));
                }
            }
            if let TimeBound::Finite(hi) = &t.interval.hi {
                let nonempty = Formula::and2(
                    k0.clone(),
                    Formula::cmp(lo.clone(), Rel::Le, hi.clone()),
                );
                if possible(&nonempty) == Some(false) {
                    out.push(diag(
                        DiagnosticKind::EmptyInterval,
                        format!("{}: interval {} is empty", t.id, t.interval),
                    ));
                }
            }
        }

        for (p, e) in self.init_marking().support() {
            if let Some(c) = e.as_constant() {
                if c.is_negative() || !c.is_integer() {
                    out.push(diag(
                        DiagnosticKind::NegativeInitialMarking,
                        format!("initial marking of {p} is {c}"),
                    ));
                }
            } else {
                let nonneg = Formula::and2(
                    k0.clone(),
                    Formula::cmp(e.clone(), Rel::Ge, 0.into()),
                );
                if possible(&nonneg) == Some(false) {
                    out.push(diag(
                        DiagnosticKind::NegativeInitialMarking,
                        format!("initial marking of {p} is negative under the initial constraint"),
                    ));
                }
            }
        }

        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Interval, Transition};
    use crate::samples;

    #[test]
    fn well_formed_net_is_clean() {
        let net = samples::producer_consumer_fixed(3, 4).unwrap();
        assert!(net.validate(None).is_empty());
    }

    #[test]
    fn empty_interval_is_reported() {
        let net = Net::builder("n")
            .place("p")
            .init("p", 1)
            .transition(Transition::new("t", Interval::closed(2, 1)).pre("p", 1))
            .build()
            .unwrap();
        let diags = net.validate(None);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::EmptyInterval);
    }

    #[test]
    fn empty_net_is_reported() {
        let net = Net::builder("n").build().unwrap();
        let diags = net.validate(None);
        assert!(diags.iter().any(|d| d.kind == DiagnosticKind::EmptyNet));
    }
}
