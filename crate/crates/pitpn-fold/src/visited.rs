//! Insertion-ordered visited set with subsumption-based membership.

use pitpn_smt::Solver;

use crate::project::{subsumes, ProjectedState, SubsumeOutcome};
use crate::FoldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The candidate was new and is now a member.
    Inserted,
    /// The candidate is covered by the member at this index.
    SubsumedBy(usize),
}

/// Projected states seen so far. Members are pairwise non-subsuming at
/// insertion time; a candidate covered by any member is rejected.
#[derive(Debug, Default)]
pub struct VisitedSet {
    entries: Vec<ProjectedState>,
    /// Check members newest-first; cycles usually close against
    /// recently visited states.
    pub newest_first: bool,
    /// Subsumption queries the solver could not decide; each one makes
    /// the search explore more than strictly necessary, never less.
    pub unknowns: u64,
}

impl VisitedSet {
    pub fn new() -> Self {
        VisitedSet { entries: Vec::new(), newest_first: true, unknowns: 0 }
    }

    pub fn oldest_first() -> Self {
        VisitedSet { newest_first: false, ..VisitedSet::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ProjectedState] {
        &self.entries
    }

    /// Inserts `candidate` unless some member subsumes it. Flag and tag
    /// mismatches and unequal ground markings are dismissed without
    /// consulting the solver.
    pub fn try_insert(
        &mut self,
        solver: &mut Solver,
        candidate: ProjectedState,
    ) -> Result<InsertOutcome, FoldError> {
        let indices: Vec<usize> = if self.newest_first {
            (0..self.entries.len()).rev().collect()
        } else {
            (0..self.entries.len()).collect()
        };
        for i in indices {
            match subsumes(solver, &candidate, &self.entries[i])? {
                SubsumeOutcome::Subsumed => return Ok(InsertOutcome::SubsumedBy(i)),
                SubsumeOutcome::NotSubsumed => {}
                SubsumeOutcome::Unknown => self.unknowns += 1,
            }
        }
        self.entries.push(candidate);
        Ok(InsertOutcome::Inserted)
    }
}
