//! Ready-made example nets used across the workspace in tests, benches,
//! and documentation.

use crate::expr::{LinExpr, Var};
use crate::formula::{Formula, Rel};
use crate::net::{Interval, Net, NetBuilder, TimeBound, Transition};
use crate::CoreError;

fn producer_base(t3: Interval) -> NetBuilder {
    Net::builder("producer_consumer")
        .places(["p1", "p2", "p3", "p4", "p5"])
        .transition(
            Transition::new("t1", Interval::closed(LinExpr::from_int(2), LinExpr::from_int(6)))
                .pre("p5", 1)
                .post("p1", 1),
        )
        .transition(
            Transition::new("t2", Interval::closed(LinExpr::from_int(2), LinExpr::from_int(4)))
                .pre("p1", 1)
                .post("p2", 1)
                .post("p5", 1),
        )
        .transition(
            Transition::new("t3", t3)
                .pre("p2", 1)
                .pre("p4", 1)
                .post("p3", 1),
        )
        .transition(
            Transition::new("t4", Interval::closed(LinExpr::zero(), LinExpr::zero()))
                .pre("p3", 1)
                .post("p4", 1),
        )
        .init("p4", 1)
        .init("p5", 1)
}

/// Producer/consumer loop with one real parameter `a` timing the
/// consuming transition `t3 = [a, a]`. Initially `p4 = 1`, `p5 = 1`;
/// constraint `a >= 0`.
pub fn producer_consumer() -> Result<Net, CoreError> {
    let a = LinExpr::var(Var::real("a"));
    producer_base(Interval::new(a.clone(), TimeBound::finite(a.clone())))
        .time_param("a")
        .constraint(Formula::cmp(a, Rel::Ge, LinExpr::zero()))
        .build()
}

/// Producer/consumer loop with a concrete consuming interval
/// `t3 = [lo, hi]` and no parameters.
pub fn producer_consumer_fixed(lo: i64, hi: i64) -> Result<Net, CoreError> {
    producer_base(Interval::closed(LinExpr::from_int(lo), LinExpr::from_int(hi))).build()
}

/// Producer/consumer loop with `t3 = [2, 3]`, integer marking parameters
/// `x1, x2, x3` seeding `p1, p2, p3`, and a free real parameter `a`.
/// Constraint: `a >= 0` and `0 <= xi <= 1` for each marking parameter.
pub fn producer_consumer_pmarking() -> Result<Net, CoreError> {
    let mut b = producer_base(Interval::closed(LinExpr::from_int(2), LinExpr::from_int(3)))
        .time_param("a")
        .constraint(Formula::cmp(
            LinExpr::var(Var::real("a")),
            Rel::Ge,
            LinExpr::zero(),
        ));
    for (i, place) in [(1, "p1"), (2, "p2"), (3, "p3")] {
        let x = Var::int(format!("x{i}"));
        b = b
            .marking_param(x.name.clone())
            .init(place, LinExpr::var(x.clone()))
            .constraint(Formula::and2(
                Formula::cmp(LinExpr::zero(), Rel::Le, LinExpr::var(x.clone())),
                Formula::cmp(LinExpr::var(x), Rel::Le, LinExpr::from_int(1)),
            ));
    }
    b.build()
}

fn inhibitor_gate_base(interval: impl Fn(usize) -> Interval) -> NetBuilder {
    Net::builder("inhibitor_gate")
        .places(["A", "B", "C", "D", "E"])
        .transition(Transition::new("t1", interval(1)).pre("A", 1).post("C", 1))
        .transition(
            Transition::new("t2", interval(2))
                .pre("B", 1)
                .post("D", 1)
                .inhibit("A", 1),
        )
        .transition(Transition::new("t3", interval(3)).pre("B", 1).post("E", 1))
        .init("A", 1)
        .init("B", 1)
}

/// Five-place net where an inhibitor arc from place `A` holds `t2` back
/// until `t1` drains `A`. Each transition has its own parametric bounds
/// `[a_i, b_i]`.
pub fn inhibitor_gate() -> Result<Net, CoreError> {
    let mut b = inhibitor_gate_base(|i| {
        Interval::closed(
            LinExpr::var(Var::real(format!("a{i}"))),
            LinExpr::var(Var::real(format!("b{i}"))),
        )
    });
    for i in 1..=3 {
        b = b.time_param(format!("a{i}")).time_param(format!("b{i}"));
    }
    b.build()
}

/// The inhibitor gate with bounds `t1 = [5, 6]`, `t2 = [3, 4]`,
/// `t3 = [1, 2]`.
pub fn inhibitor_gate_instance() -> Result<Net, CoreError> {
    let spans = [(5, 6), (3, 4), (1, 2)];
    inhibitor_gate_base(|i| {
        let (lo, hi) = spans[i - 1];
        Interval::closed(LinExpr::from_int(lo), LinExpr::from_int(hi))
    })
    .build()
}

/// Periodic three-task scheduler. Task `i` releases a job every `i*a`
/// time units (transition `period_i`, self-inhibited at two pending
/// jobs), executes for `48*i` (transition `exec_i`), and retires the
/// result immediately (transition `end_i`). Parameter constraint:
/// `30 <= a <= 70`.
pub fn scheduler() -> Result<Net, CoreError> {
    let a = Var::real("a");
    let mut b = Net::builder("scheduling")
        .time_param("a")
        .constraint(Formula::and2(
            Formula::cmp(LinExpr::from_int(30), Rel::Le, LinExpr::var(a.clone())),
            Formula::cmp(LinExpr::var(a.clone()), Rel::Le, LinExpr::from_int(70)),
        ));
    for i in 1..=3i64 {
        let ready = format!("ready{i}");
        let ending = format!("ending{i}");
        let period = LinExpr::var(a.clone()).scale(&crate::rat::rat(i));
        b = b
            .place(ready.clone())
            .place(ending.clone())
            .transition(
                Transition::new(
                    format!("period{i}"),
                    Interval::closed(period.clone(), period),
                )
                .post(ready.clone(), 1)
                .inhibit(ready.clone(), 2),
            )
            .transition(
                Transition::new(
                    format!("exec{i}"),
                    Interval::closed(LinExpr::from_int(48 * i), LinExpr::from_int(48 * i)),
                )
                .pre(ready, 1)
                .post(ending.clone(), 1),
            )
            .transition(
                Transition::new(
                    format!("end{i}"),
                    Interval::closed(LinExpr::zero(), LinExpr::zero()),
                )
                .pre(ending, 1),
            );
    }
    b.build()
}

/// Fork/join round: `fork` splits a token from `start` into a child and
/// a father branch, the child takes `[a, b]`, the father `[5, 15]`,
/// `join` collects two completions of each, and `startOver` refills
/// `start` with two tokens. Constraint: `0 <= a <= b`.
pub fn forkjoin() -> Result<Net, CoreError> {
    let a = Var::real("a");
    let bvar = Var::real("b");
    Net::builder("tutorial")
        .places([
            "start",
            "childStart",
            "fatherCont",
            "childDone",
            "fatherDone",
            "joined",
        ])
        .time_param("a")
        .time_param("b")
        .constraint(Formula::and2(
            Formula::cmp(LinExpr::zero(), Rel::Le, LinExpr::var(a.clone())),
            Formula::cmp(LinExpr::var(a.clone()), Rel::Le, LinExpr::var(bvar.clone())),
        ))
        .transition(
            Transition::new("fork", Interval::closed(LinExpr::zero(), LinExpr::zero()))
                .pre("start", 1)
                .post("childStart", 1)
                .post("fatherCont", 1),
        )
        .transition(
            Transition::new(
                "child",
                Interval::closed(LinExpr::var(a), LinExpr::var(bvar)),
            )
            .pre("childStart", 1)
            .post("childDone", 1),
        )
        .transition(
            Transition::new(
                "father",
                Interval::closed(LinExpr::from_int(5), LinExpr::from_int(15)),
            )
            .pre("fatherCont", 1)
            .post("fatherDone", 1),
        )
        .transition(
            Transition::new("join", Interval::closed(LinExpr::zero(), LinExpr::zero()))
                .pre("childDone", 2)
                .pre("fatherDone", 2)
                .post("joined", 1),
        )
        .transition(
            Transition::new(
                "startOver",
                Interval::closed(LinExpr::from_int(1), LinExpr::from_int(2)),
            )
            .pre("joined", 1)
            .post("start", 2),
        )
        .init("start", 2)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_samples_build() {
        for net in [
            producer_consumer(),
            producer_consumer_fixed(3, 4),
            producer_consumer_pmarking(),
            inhibitor_gate(),
            inhibitor_gate_instance(),
            scheduler(),
            forkjoin(),
        ] {
            let net = net.unwrap();
            assert!(net.validate(None).is_empty(), "{}", net.name);
        }
    }

    #[test]
    fn shapes() {
        let net = producer_consumer().unwrap();
        assert_eq!(net.places().len(), 5);
        assert_eq!(net.transitions().len(), 4);
        assert_eq!(net.time_params().len(), 1);

        let sched = scheduler().unwrap();
        assert_eq!(sched.places().len(), 6);
        assert_eq!(sched.transitions().len(), 9);

        let fj = forkjoin().unwrap();
        assert_eq!(fj.places().len(), 6);
        assert_eq!(fj.transitions().len(), 5);
        assert_eq!(fj.time_params().len(), 2);
    }
}
