//! Per-thread event counters.
//!
//! Counter semantics, shared by the implementation and the sequential
//! counting model in the tests:
//!
//! * `adds` / `rems` - successful add / remove operations.
//! * `trav` - nodes stepped onto during position searches, beyond the start
//!   node: the first candidate loaded from the start predecessor, every
//!   forward advance, every successor adopted after an unlink CAS, and every
//!   backward hop of a prev walk.
//! * `cons` - the same step count for contains traversals.
//! * `fail` - failed CAS operations of any kind, plus fetch-or calls that
//!   found the mark already set.
//! * `rtry` - times a position search restarted from its retry point.
//!
//! Counters are owned by one thread and bumped with plain arithmetic so that
//! measurement does not perturb the benchmark; aggregation happens after the
//! workers have joined.

use std::fmt;
use std::ops::{Add, AddAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub adds: u64,
    pub rems: u64,
    pub cons: u64,
    pub trav: u64,
    pub fail: u64,
    pub rtry: u64,
}

impl Counters {
    /// Field-wise sum over joined workers' counters.
    pub fn aggregate<'a, I>(parts: I) -> Counters
    where
        I: IntoIterator<Item = &'a Counters>,
    {
        parts.into_iter().fold(Counters::default(), |acc, c| acc + *c)
    }
}

impl Add for Counters {
    type Output = Counters;

    fn add(self, rhs: Counters) -> Counters {
        Counters {
            adds: self.adds + rhs.adds,
            rems: self.rems + rhs.rems,
            cons: self.cons + rhs.cons,
            trav: self.trav + rhs.trav,
            fail: self.fail + rhs.fail,
            rtry: self.rtry + rhs.rtry,
        }
    }
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Counters) {
        *self = *self + rhs;
    }
}

impl fmt::Display for Counters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adds={} rems={} cons={} trav={} fail={} rtry={}",
            self.adds, self.rems, self.cons, self.trav, self.fail, self.rtry
        )
    }
}
