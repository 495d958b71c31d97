//! High-level solver client with scoped queries and lazy respawn.

use std::path::Path;
use std::time::Duration;

use pitpn_core::formula::Formula;
use pitpn_core::{SatOracle, SatVerdict};

use crate::parse::{self, Model};
use crate::printer;
use crate::session::{Response, Session, SolverConfig};
use crate::SmtError;

/// Outcome of a satisfiability query that also asks for a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelOutcome {
    Sat(Model),
    Unsat,
    Unknown,
}

/// Outcome of a validity query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
    Unknown,
}

/// Counters over the lifetime of a [`Solver`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub queries: u64,
    pub sat: u64,
    pub unsat: u64,
    pub unknown: u64,
    pub qe_calls: u64,
    pub respawns: u64,
}

/// A solver client. The underlying process starts on first use; every
/// query runs in its own `push`/`pop` scope with its variables declared
/// locally, so queries are independent. A session that errors out or
/// times out is discarded and a fresh one is spawned on the next query.
pub struct Solver {
    config: SolverConfig,
    session: Option<Session>,
    spawned_before: bool,
    stats: SolverStats,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config, session: None, spawned_before: false, stats: SolverStats::default() }
    }

    /// Resolves a solver per the standard order and wraps it.
    pub fn from_env(explicit: Option<&Path>) -> Result<Self, SmtError> {
        Ok(Solver::new(SolverConfig::resolve(explicit)?))
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Changes the per-query budget. Takes effect on the next spawned
    /// session; the current one is retired.
    pub fn set_timeout(&mut self, timeout: Duration) {
        self.config.timeout = timeout;
        self.session = None;
    }

    pub fn check_sat(&mut self, f: &Formula) -> Result<SatVerdict, SmtError> {
        match self.query(f, false)? {
            ModelOutcome::Sat(_) => Ok(SatVerdict::Sat),
            ModelOutcome::Unsat => Ok(SatVerdict::Unsat),
            ModelOutcome::Unknown => Ok(SatVerdict::Unknown),
        }
    }

    /// Satisfiability plus a parsed model on the sat branch. Models for
    /// quantifier-free formulas are re-evaluated natively; a model that
    /// fails its own formula is reported as an error instead of used.
    pub fn check_sat_model(&mut self, f: &Formula) -> Result<ModelOutcome, SmtError> {
        let outcome = self.query(f, true)?;
        if let ModelOutcome::Sat(model) = &outcome {
            if f.is_quantifier_free() {
                let env = |v: &pitpn_core::expr::Var| Some(model.value_or_zero(v));
                match f.eval(&env) {
                    Ok(true) => {}
                    Ok(false) => return Err(SmtError::ModelUnsound),
                    Err(e) => return Err(SmtError::Parse(e.to_string())),
                }
            }
        }
        Ok(outcome)
    }

    /// Validity of `f`: unsatisfiability of its negation.
    pub fn check_valid(&mut self, f: &Formula) -> Result<Validity, SmtError> {
        match self.check_sat(&Formula::not_(f.clone()))? {
            SatVerdict::Unsat => Ok(Validity::Valid),
            SatVerdict::Sat => Ok(Validity::Invalid),
            SatVerdict::Unknown => Ok(Validity::Unknown),
        }
    }

    /// Logical equivalence of two formulas.
    pub fn equiv(&mut self, a: &Formula, b: &Formula) -> Result<Validity, SmtError> {
        self.check_valid(&Formula::iff(a.clone(), b.clone()))
    }

    /// Quantifier elimination. Returns a quantifier-free formula over
    /// the free variables of `f`, equivalent to `f`. If-then-else terms
    /// are expanded into case splits first so the returned formula is a
    /// plain boolean combination of linear atoms.
    pub fn qe(&mut self, f: &Formula) -> Result<Formula, SmtError> {
        if !self.config.family.supports_qe() {
            return Err(SmtError::Unsupported(format!(
                "quantifier elimination is not available with {}",
                self.config.family
            )));
        }
        self.stats.qe_calls += 1;
        let expanded = f.expand_ite();
        if let Formula::Bool(_) = expanded {
            return Ok(expanded);
        }
        let free: Vec<_> = expanded.free_vars().into_iter().collect();
        let table = parse::symbol_table(free.iter());
        let decls = printer::declarations(free.iter());
        let text = printer::formula(&expanded);

        let session = self.session()?;
        let result = (|| {
            session.expect_success("(push 1)")?;
            for d in &decls {
                session.expect_success(d)?;
            }
            session.expect_success(&format!("(assert {text})"))?;
            let goals = match session.command("(apply (then simplify qe))")? {
                Response::Expr(sx) => sx,
                other => {
                    return Err(SmtError::Protocol(format!(
                        "expected goals from apply, got {other:?}"
                    )))
                }
            };
            session.expect_success("(pop 1)")?;
            parse::parse_goals(&goals, &table)
        })();
        if result.is_err() {
            self.session = None;
        }
        result
    }

    /// Runs `check-sat` (and optionally `get-model`) in a fresh scope.
    fn query(&mut self, f: &Formula, want_model: bool) -> Result<ModelOutcome, SmtError> {
        if !f.is_quantifier_free() && !self.config.family.supports_quantifiers() {
            return Err(SmtError::Unsupported(format!(
                "{} cannot decide quantified formulas",
                self.config.family
            )));
        }
        self.stats.queries += 1;
        let free: Vec<_> = f.free_vars().into_iter().collect();
        let table = parse::symbol_table(free.iter());
        let decls = printer::declarations(free.iter());
        let text = printer::formula(f);
        // The incremental core gives up on quantified arithmetic with
        // equalities; eliminating quantifiers first keeps it decidable.
        let check_cmd = if f.is_quantifier_free() || !self.config.family.supports_qe() {
            "(check-sat)"
        } else {
            "(check-sat-using (then qe smt))"
        };

        let session = self.session()?;
        let result = (|| {
            session.expect_success("(push 1)")?;
            for d in &decls {
                session.expect_success(d)?;
            }
            session.expect_success(&format!("(assert {text})"))?;
            let verdict = match session.command(check_cmd)? {
                Response::Sat => SatVerdict::Sat,
                Response::Unsat => SatVerdict::Unsat,
                Response::Unknown => SatVerdict::Unknown,
                other => {
                    return Err(SmtError::Protocol(format!(
                        "expected a verdict from check-sat, got {other:?}"
                    )))
                }
            };
            let outcome = match verdict {
                SatVerdict::Sat if want_model => match session.command("(get-model)")? {
                    Response::Expr(sx) => ModelOutcome::Sat(parse::parse_model(&sx, &table)?),
                    other => {
                        return Err(SmtError::Protocol(format!(
                            "expected a model, got {other:?}"
                        )))
                    }
                },
                SatVerdict::Sat => ModelOutcome::Sat(Model::default()),
                SatVerdict::Unsat => ModelOutcome::Unsat,
                SatVerdict::Unknown => ModelOutcome::Unknown,
            };
            session.expect_success("(pop 1)")?;
            Ok(outcome)
        })();
        match &result {
            Ok(ModelOutcome::Sat(_)) => self.stats.sat += 1,
            Ok(ModelOutcome::Unsat) => self.stats.unsat += 1,
            Ok(ModelOutcome::Unknown) => self.stats.unknown += 1,
            // The scope stack is now unbalanced; retire the session.
            Err(_) => self.session = None,
        }
        result
    }

    fn session(&mut self) -> Result<&mut Session, SmtError> {
        if self.session.is_none() {
            if self.spawned_before {
                self.stats.respawns += 1;
            }
            self.session = Some(Session::spawn(&self.config)?);
            self.spawned_before = true;
        }
        Ok(self.session.as_mut().expect("session was just created"))
    }
}

impl SatOracle for Solver {
    fn check_sat_formula(&mut self, f: &Formula) -> SatVerdict {
        self.check_sat(f).unwrap_or(SatVerdict::Unknown)
    }
}
