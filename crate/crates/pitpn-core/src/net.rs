//! Net structure: places, transitions with arcs and parametric firing
//! intervals, parameter declarations, and the initial constraint.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;

use crate::expr::{LinExpr, Sort, Var};
use crate::formula::{Formula, Rel};
use crate::marking::Marking;
use crate::CoreError;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn name(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

id_type!(
    /// Place identifier, unique among the net's places.
    PlaceId
);
id_type!(
    /// Transition identifier, unique among the net's transitions.
    TransitionId
);
id_type!(
    /// Parameter identifier, unique among the net's parameters.
    ParamId
);

/// Right endpoint of a firing interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TimeBound {
    Finite(LinExpr),
    Infinite,
}

impl TimeBound {
    pub fn finite(e: impl Into<LinExpr>) -> Self {
        TimeBound::Finite(e.into())
    }

    pub fn as_finite(&self) -> Option<&LinExpr> {
        match self {
            TimeBound::Finite(e) => Some(e),
            TimeBound::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TimeBound::Infinite)
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeBound::Finite(e) => write!(f, "{e}"),
            TimeBound::Infinite => write!(f, "inf"),
        }
    }
}

/// Parametric firing interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: LinExpr,
    pub hi: TimeBound,
}

impl Interval {
    pub fn new(lo: impl Into<LinExpr>, hi: TimeBound) -> Self {
        Interval { lo: lo.into(), hi }
    }

    pub fn closed(lo: impl Into<LinExpr>, hi: impl Into<LinExpr>) -> Self {
        Interval { lo: lo.into(), hi: TimeBound::Finite(hi.into()) }
    }

    pub fn unbounded(lo: impl Into<LinExpr>) -> Self {
        Interval { lo: lo.into(), hi: TimeBound::Infinite }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A transition with its arc multisets and firing interval. Pre, post and
/// inhibitor entries are constant non-negative weights; only the initial
/// marking of a net may be parametric.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub id: TransitionId,
    pub pre: Marking,
    pub post: Marking,
    pub inhibit: Marking,
    pub interval: Interval,
}

impl Transition {
    pub fn new(id: impl Into<TransitionId>, interval: Interval) -> Self {
        Transition {
            id: id.into(),
            pre: Marking::empty(),
            post: Marking::empty(),
            inhibit: Marking::empty(),
            interval,
        }
    }

    pub fn pre(mut self, place: impl Into<PlaceId>, weight: u64) -> Self {
        self.pre.set(place.into(), LinExpr::from_int(weight as i64));
        self
    }

    pub fn post(mut self, place: impl Into<PlaceId>, weight: u64) -> Self {
        self.post.set(place.into(), LinExpr::from_int(weight as i64));
        self
    }

    pub fn inhibit(mut self, place: impl Into<PlaceId>, weight: u64) -> Self {
        self.inhibit.set(place.into(), LinExpr::from_int(weight as i64));
        self
    }
}

/// An immutable parametric time Petri net with inhibitor arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub name: String,
    places: Vec<PlaceId>,
    transitions: Vec<Transition>,
    time_params: Vec<ParamId>,
    marking_params: Vec<ParamId>,
    init_marking: Marking,
    init_constraint: Formula,
}

impl Net {
    pub fn builder(name: impl Into<String>) -> NetBuilder {
        NetBuilder {
            name: name.into(),
            places: Vec::new(),
            transitions: Vec::new(),
            time_params: Vec::new(),
            marking_params: Vec::new(),
            init_marking: Marking::empty(),
            init_constraint: Formula::tt(),
        }
    }

    pub fn places(&self) -> &[PlaceId] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: &TransitionId) -> Result<&Transition, CoreError> {
        self.transitions
            .iter()
            .find(|t| &t.id == id)
            .ok_or_else(|| CoreError::UnknownTransition(id.name().to_owned()))
    }

    pub fn has_place(&self, id: &PlaceId) -> bool {
        self.places.contains(id)
    }

    pub fn time_params(&self) -> &[ParamId] {
        &self.time_params
    }

    pub fn marking_params(&self) -> &[ParamId] {
        &self.marking_params
    }

    /// All parameters as sorted solver variables: time parameters are
    /// real, marking parameters are integer.
    pub fn param_vars(&self) -> Vec<Var> {
        self.time_params
            .iter()
            .map(|p| Var::real(p.name()))
            .chain(self.marking_params.iter().map(|p| Var::int(p.name())))
            .collect()
    }

    pub fn param_var(&self, id: &ParamId) -> Result<Var, CoreError> {
        if self.time_params.contains(id) {
            Ok(Var::real(id.name()))
        } else if self.marking_params.contains(id) {
            Ok(Var::int(id.name()))
        } else {
            Err(CoreError::UnknownParam(id.name().to_owned()))
        }
    }

    pub fn is_parametric(&self) -> bool {
        !self.time_params.is_empty() || !self.marking_params.is_empty()
    }

    /// Initial marking, total over the net's places (absent entries are 0).
    pub fn init_marking(&self) -> &Marking {
        &self.init_marking
    }

    pub fn init_constraint(&self) -> &Formula {
        &self.init_constraint
    }

    /// Replaces the initial marking, e.g. with a parametric one. Entries
    /// must reference declared places and marking parameters only.
    pub fn with_init_marking(mut self, m: Marking) -> Result<Net, CoreError> {
        let marking_vars: BTreeSet<Var> = self
            .marking_params
            .iter()
            .map(|p| Var::int(p.name()))
            .collect();
        for (p, e) in m.support() {
            if !self.places.contains(p) {
                return Err(CoreError::UnknownPlace(p.name().to_owned()));
            }
            for v in e.vars() {
                if !marking_vars.contains(v) {
                    return Err(CoreError::UnknownParam(v.name.clone()));
                }
            }
        }
        self.init_marking = m;
        Ok(self)
    }

    /// Conjoins an extra constraint onto the initial constraint.
    pub fn with_extra_constraint(mut self, f: Formula) -> Net {
        self.init_constraint = Formula::and2(self.init_constraint, f);
        self
    }
}

/// Builder for [`Net`]; `build` validates referential integrity.
pub struct NetBuilder {
    name: String,
    places: Vec<PlaceId>,
    transitions: Vec<Transition>,
    time_params: Vec<ParamId>,
    marking_params: Vec<ParamId>,
    init_marking: Marking,
    init_constraint: Formula,
}

impl NetBuilder {
    pub fn place(mut self, id: impl Into<PlaceId>) -> Self {
        self.places.push(id.into());
        self
    }

    pub fn places<I, P>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<PlaceId>,
    {
        self.places.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn time_param(mut self, id: impl Into<ParamId>) -> Self {
        self.time_params.push(id.into());
        self
    }

    pub fn marking_param(mut self, id: impl Into<ParamId>) -> Self {
        self.marking_params.push(id.into());
        self
    }

    pub fn transition(mut self, t: Transition) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn init(mut self, place: impl Into<PlaceId>, tokens: impl Into<LinExpr>) -> Self {
        self.init_marking.set(place.into(), tokens.into());
        self
    }

    pub fn constraint(mut self, f: Formula) -> Self {
        self.init_constraint = Formula::and2(self.init_constraint, f);
        self
    }

    pub fn build(self) -> Result<Net, CoreError> {
        // The `#` prefix is reserved for generated solver variables.
        let check_id = |name: &str, seen: &mut BTreeSet<String>| {
            if name.is_empty() {
                return Err(CoreError::EmptyId);
            }
            if name.starts_with('#') {
                return Err(CoreError::ReservedId(name.to_owned()));
            }
            if !seen.insert(name.to_owned()) {
                return Err(CoreError::DuplicateId(name.to_owned()));
            }
            Ok(())
        };
        let mut seen = BTreeSet::new();
        for p in &self.places {
            check_id(p.name(), &mut seen)?;
        }
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            check_id(t.id.name(), &mut seen)?;
        }
        let mut seen = BTreeSet::new();
        for p in self.time_params.iter().chain(&self.marking_params) {
            check_id(p.name(), &mut seen)?;
        }

        let time_vars: BTreeSet<Var> = self
            .time_params
            .iter()
            .map(|p| Var::real(p.name()))
            .collect();
        let marking_vars: BTreeSet<Var> = self
            .marking_params
            .iter()
            .map(|p| Var::int(p.name()))
            .collect();

        for t in &self.transitions {
            for m in [&t.pre, &t.post, &t.inhibit] {
                for (p, e) in m.support() {
                    if !self.places.contains(p) {
                        return Err(CoreError::UnknownPlace(p.name().to_owned()));
                    }
                    let c = e
                        .as_constant()
                        .ok_or_else(|| CoreError::NonConstant(format!("arc weight on {p}")))?;
                    if c.is_negative() || !c.is_integer() {
                        return Err(CoreError::Invalid(format!(
                            "arc weight on {p} of {} must be a non-negative integer",
                            t.id
                        )));
                    }
                }
            }
            for e in [Some(&t.interval.lo), t.interval.hi.as_finite()]
                .into_iter()
                .flatten()
            {
                for v in e.vars() {
                    if !time_vars.contains(v) {
                        return Err(CoreError::UnknownParam(v.name.clone()));
                    }
                }
            }
        }

        for (p, e) in self.init_marking.support() {
            if !self.places.contains(p) {
                return Err(CoreError::UnknownPlace(p.name().to_owned()));
            }
            for v in e.vars() {
                if !marking_vars.contains(v) {
                    return Err(CoreError::UnknownParam(v.name.clone()));
                }
            }
        }

        for v in self.init_constraint.free_vars() {
            let ok = match v.sort {
                Sort::Real => time_vars.contains(&v),
                Sort::Int => marking_vars.contains(&v),
            };
            if !ok {
                return Err(CoreError::UnknownParam(v.name.clone()));
            }
        }

        Ok(Net {
            name: self.name,
            places: self.places,
            transitions: self.transitions,
            time_params: self.time_params,
            marking_params: self.marking_params,
            init_marking: self.init_marking,
            init_constraint: self.init_constraint,
        })
    }
}

/// Convenience constructor for interval atoms `lo <= e <= hi`.
pub fn in_interval(e: &LinExpr, interval: &Interval) -> Formula {
    let lower = Formula::cmp(interval.lo.clone(), Rel::Le, e.clone());
    match &interval.hi {
        TimeBound::Finite(hi) => {
            Formula::and2(lower, Formula::cmp(e.clone(), Rel::Le, hi.clone()))
        }
        TimeBound::Infinite => lower,
    }
}
