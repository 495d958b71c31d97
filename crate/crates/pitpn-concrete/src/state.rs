//! Concrete execution states: a constant marking plus one clock per
//! transition, with optional tick-alternation flag and global time.

use std::fmt;

use num_traits::Zero;
use pitpn_core::{PlaceId, Rat};

use crate::compiled::CompiledNet;

/// Which bookkeeping the state carries. `alternating` forbids two ticks
/// in a row via a flag; `timed` accumulates total elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mode {
    pub alternating: bool,
    pub timed: bool,
}

impl Mode {
    /// Plain clock semantics: no flag, no global time.
    pub fn plain() -> Self {
        Mode::default()
    }

    pub fn alternating() -> Self {
        Mode {
            alternating: true,
            timed: false,
        }
    }

    pub fn timed() -> Self {
        Mode {
            alternating: false,
            timed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConcreteState {
    /// `Some(true)` when a tick is allowed next (alternating mode only).
    pub tick_ok: Option<bool>,
    pub marking: Vec<u64>,
    pub clocks: Vec<Rat>,
    /// Total elapsed time (timed mode only).
    pub global: Option<Rat>,
}

impl ConcreteState {
    pub fn initial(net: &CompiledNet, mode: Mode) -> Self {
        let s = ConcreteState {
            tick_ok: mode.alternating.then_some(true),
            marking: net.init_marking.clone(),
            clocks: vec![Rat::zero(); net.transitions.len()],
            global: mode.timed.then(Rat::zero),
        };
        s.assert_invariant(net);
        s
    }

    pub fn tokens(&self, net: &CompiledNet, place: &PlaceId) -> Option<u64> {
        net.place_index(place).map(|i| self.marking[i])
    }

    pub fn mode(&self) -> Mode {
        Mode {
            alternating: self.tick_ok.is_some(),
            timed: self.global.is_some(),
        }
    }

    /// Soundness check on every constructed state: a disabled transition
    /// holds clock 0, and an active transition never overshoots its
    /// latest firing time.
    pub fn assert_invariant(&self, net: &CompiledNet) {
        for (ti, t) in net.transitions.iter().enumerate() {
            if !net.enabled(&self.marking, ti) {
                assert!(
                    self.clocks[ti].is_zero(),
                    "disabled transition `{}` has clock {}",
                    t.id,
                    self.clocks[ti]
                );
            } else if net.active(&self.marking, ti) {
                if let Some(hi) = &t.hi {
                    assert!(
                        self.clocks[ti] <= *hi,
                        "active transition `{}` overshot its deadline: {} > {}",
                        t.id,
                        self.clocks[ti],
                        hi
                    );
                }
            }
        }
    }
}

impl fmt::Display for ConcreteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(ok) = self.tick_ok {
            write!(f, "{} : ", if ok { "tickOk" } else { "tickNotOk" })?;
        }
        write!(f, "m[")?;
        for (i, n) in self.marking.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "] c[")?;
        for (i, c) in self.clocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", pitpn_core::rat::display(c))?;
        }
        write!(f, "]")?;
        if let Some(gt) = &self.global {
            write!(f, " @ {}", pitpn_core::rat::display(gt))?;
        }
        Ok(())
    }
}
