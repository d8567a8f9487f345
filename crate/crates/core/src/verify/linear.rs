//! Brute-force linearizability checking for small recorded histories.
//!
//! The checker searches for a permutation of the completed operations that
//! respects real-time order (a response with a smaller stamp than another
//! operation's invocation must come first) and replays correctly on the
//! sequential set model. It linearizes greedily and backtracks, memoizing
//! (linearized-set, state) pairs so that a failed subtree is never explored
//! twice.

use std::collections::HashSet;

use super::history::{HistoryEvent, Op, Phase};

/// Hard bound on checkable operations; the search is exponential in the
/// worst case and the bitmask encodings rely on it.
pub const MAX_CHECK_OPS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckError {
    /// The history has more completed operations than the brute-force bound.
    TooLarge { ops: usize },
    Malformed { message: String },
}

impl std::fmt::Display for CheckError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckError::TooLarge { ops } => {
                write!(f, "history has {ops} operations, checker bound is {MAX_CHECK_OPS}")
            }
            CheckError::Malformed { message } => write!(f, "malformed history: {message}"),
        }
    }
}

impl std::error::Error for CheckError {}

struct OpRec {
    op: Op,
    key_idx: usize,
    result: bool,
}

/// Sequential set model step. Returns whether the recorded result is the
/// model's result in this state, and the state after the operation (failed
/// add/rem leave the state unchanged).
fn apply(rec: &OpRec, state: u64) -> (bool, u64) {
    let bit = 1u64 << rec.key_idx;
    let present = state & bit != 0;
    let (model, next) = match rec.op {
        Op::Add => (!present, state | bit),
        Op::Rem => (present, state & !bit),
        Op::Con => (present, state),
    };
    if model == rec.result {
        (true, if model { next } else { state })
    } else {
        (false, state)
    }
}

/// True iff the history is linearizable with respect to the sequential set
/// starting from the empty set. Histories must be complete: every invocation
/// has its response.
pub fn check_linearizable(events: &[HistoryEvent]) -> Result<bool, CheckError> {
    let malformed = |message: String| CheckError::Malformed { message };

    let mut events: Vec<&HistoryEvent> = events.iter().collect();
    events.sort_by_key(|e| e.stamp);

    // Pair invocations with responses per thread; threads alternate phases.
    let mut ops: Vec<OpRec> = Vec::new();
    let mut keys: Vec<i64> = Vec::new();
    let mut entries: Vec<(usize, bool)> = Vec::new(); // (op id, is_call)
    let mut pending: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for e in &events {
        match e.phase {
            Phase::Invoke => {
                if pending.contains_key(&e.thread) {
                    return Err(malformed(format!(
                        "thread {} invoked twice without responding",
                        e.thread
                    )));
                }
                let key_idx = match keys.iter().position(|&k| k == e.key) {
                    Some(i) => i,
                    None => {
                        keys.push(e.key);
                        keys.len() - 1
                    }
                };
                let id = ops.len();
                ops.push(OpRec {
                    op: e.op,
                    key_idx,
                    result: false,
                });
                pending.insert(e.thread, id);
                entries.push((id, true));
            }
            Phase::Respond => {
                let id = pending.remove(&e.thread).ok_or_else(|| {
                    malformed(format!("thread {} responded without invoking", e.thread))
                })?;
                let rec = &mut ops[id];
                if rec.op != e.op || keys[rec.key_idx] != e.key {
                    return Err(malformed(format!(
                        "thread {} response does not match its invocation",
                        e.thread
                    )));
                }
                rec.result = e
                    .result
                    .ok_or_else(|| malformed("respond event without result".into()))?;
                entries.push((id, false));
            }
        }
    }
    if !pending.is_empty() {
        return Err(malformed("history has unresponded invocations".into()));
    }
    if ops.len() > MAX_CHECK_OPS {
        return Err(CheckError::TooLarge { ops: ops.len() });
    }
    if keys.len() > 64 {
        return Err(malformed("more than 64 distinct keys".into()));
    }

    // Doubly linked list over entry indices, `n` as the sentinel.
    let n = entries.len();
    let mut next: Vec<usize> = (1..=n).collect();
    next.push(0); // sentinel -> first entry (or itself when empty)
    let mut prev: Vec<usize> = (0..=n).map(|i| if i == 0 { n } else { i - 1 }).collect();

    let mut call_entry = vec![0usize; ops.len()];
    let mut return_entry = vec![0usize; ops.len()];
    for (idx, &(id, is_call)) in entries.iter().enumerate() {
        if is_call {
            call_entry[id] = idx;
        } else {
            return_entry[id] = idx;
        }
    }

    let unlink = |next: &mut Vec<usize>, prev: &mut Vec<usize>, i: usize| {
        next[prev[i]] = next[i];
        prev[next[i]] = prev[i];
    };
    let relink = |next: &mut Vec<usize>, prev: &mut Vec<usize>, i: usize| {
        next[prev[i]] = i;
        prev[next[i]] = i;
    };

    let mut state = 0u64;
    let mut linearized = 0u64;
    let mut cache: HashSet<(u64, u64)> = HashSet::new();
    let mut stack: Vec<(usize, u64)> = Vec::new();
    let mut entry = next[n];

    loop {
        if next[n] == n {
            return Ok(true);
        }
        debug_assert_ne!(entry, n, "scan ran past the last pending return");
        let (id, is_call) = entries[entry];
        if is_call {
            let (valid, new_state) = apply(&ops[id], state);
            if valid && cache.insert((linearized | (1 << id), new_state)) {
                stack.push((id, state));
                state = new_state;
                linearized |= 1 << id;
                unlink(&mut next, &mut prev, call_entry[id]);
                unlink(&mut next, &mut prev, return_entry[id]);
                entry = next[n];
            } else {
                entry = next[entry];
            }
        } else {
            // The earliest pending response belongs to an op we failed to
            // linearize: undo the latest choice, or give up.
            match stack.pop() {
                None => return Ok(false),
                Some((undo, old_state)) => {
                    state = old_state;
                    linearized &= !(1 << undo);
                    relink(&mut next, &mut prev, return_entry[undo]);
                    relink(&mut next, &mut prev, call_entry[undo]);
                    entry = next[call_entry[undo]];
                }
            }
        }
    }
}
