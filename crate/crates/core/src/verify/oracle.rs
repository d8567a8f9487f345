//! Sequential reference model: a sorted set with textbook semantics.

use std::collections::BTreeSet;

use super::history::Op;

/// Replays a sequential script against a reference sorted set. `add` returns
/// true iff the key was absent, `rem` true iff present, `con` membership.
pub fn oracle_replay(script: &[(Op, i64)]) -> Vec<bool> {
    let mut set = BTreeSet::new();
    script
        .iter()
        .map(|&(op, key)| match op {
            Op::Add => set.insert(key),
            Op::Rem => set.remove(&key),
            Op::Con => set.contains(&key),
        })
        .collect()
}
