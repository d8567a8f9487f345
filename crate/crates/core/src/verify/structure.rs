//! Quiescent structural checks.
//!
//! All checks assume no operation is in flight and all contexts have been
//! dropped or finished. Walks need no external step bound: every next link
//! points to a strictly larger key and every prev reference to a strictly
//! smaller one, so a walk either stays monotone (and therefore terminates on
//! the finite population) or surfaces the violation that broke monotonicity.
//!
//! The final check performs one full-range position sweep, which unlinks any
//! remaining marked nodes, then verifies none stayed reachable.

use std::fmt;
use std::sync::atomic::Ordering;

use crate::link::{node_ref, Node, KEY_MAX};
use crate::list::List;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureViolation {
    /// Head's next link carries the delete mark.
    HeadMarked,
    /// Adjacent reachable keys out of strict order (also reported when a
    /// cycle would otherwise make the walk diverge).
    OrderViolation { before: i64, after: i64 },
    /// Forward walk from head hit a null link before reaching tail.
    ChainNotTerminated { steps: u64 },
    /// A node's prev walk did not strictly descend towards head.
    BackwardUnreachable { key: i64, steps: u64 },
    /// A marked node is still reachable from head after a full sweep.
    MarkedReachable { key: i64 },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::HeadMarked => write!(f, "head sentinel is marked"),
            StructureViolation::OrderViolation { before, after } => {
                write!(f, "keys out of order: {before} precedes {after}")
            }
            StructureViolation::ChainNotTerminated { steps } => {
                write!(f, "chain hit a null link after {steps} steps without reaching tail")
            }
            StructureViolation::BackwardUnreachable { key, steps } => {
                write!(f, "no backward path to head from key {key} within {steps} steps")
            }
            StructureViolation::MarkedReachable { key } => {
                write!(f, "marked node with key {key} reachable after sweep")
            }
        }
    }
}

/// Walks the raw next chain from head, reporting order breaks or a missing
/// tail. `on_node` sees every non-sentinel node with its marked flag.
fn walk_chain(
    list: &List,
    violations: &mut Vec<StructureViolation>,
    mut on_node: impl FnMut(&Node, bool, &mut Vec<StructureViolation>),
) {
    let head = list.head_node();
    let tail_ptr = list.tail_node() as *const Node as *mut Node;
    let mut last_key = head.key;
    let mut steps = 0u64;
    let mut p = head.next.load().pointer();
    while p != tail_ptr {
        if p.is_null() {
            violations.push(StructureViolation::ChainNotTerminated { steps });
            return;
        }
        let n = unsafe { node_ref(p) };
        if n.key <= last_key {
            // The chain is untrustworthy past this point; stop here.
            violations.push(StructureViolation::OrderViolation {
                before: last_key,
                after: n.key,
            });
            return;
        }
        let w = n.next.load();
        on_node(n, w.is_marked(), violations);
        last_key = n.key;
        p = w.pointer();
        steps += 1;
    }
}

/// Runs all structural checks; an empty result means pass.
pub fn check_structure(list: &List) -> Vec<StructureViolation> {
    let mut violations = Vec::new();
    let head = list.head_node();
    let head_ptr = head as *const Node as *mut Node;

    if head.next.load().is_marked() {
        violations.push(StructureViolation::HeadMarked);
    }

    // (1)+(2): strict key order along the chain from head, terminating at tail.
    walk_chain(list, &mut violations, |_, _, _| {});

    // (3): doubly variants only - every node ever inserted still has a
    // strictly descending (hence finite) backward path to head.
    if list.variant().is_doubly() {
        let tail_ptr = list.tail_node() as *const Node as *mut Node;
        for &start in list.allocated_nodes().iter().chain([&tail_ptr]) {
            let key = unsafe { node_ref(start) }.key;
            let mut p = start;
            let mut last_key = key;
            let mut steps = 0u64;
            let reached = loop {
                if p == head_ptr {
                    break true;
                }
                p = unsafe { node_ref(p) }.prev.load(Ordering::Acquire);
                if p.is_null() {
                    break false;
                }
                let k = unsafe { node_ref(p) }.key;
                if p != head_ptr && k >= last_key {
                    break false;
                }
                last_key = k;
                steps += 1;
            };
            if !reached {
                violations.push(StructureViolation::BackwardUnreachable { key, steps });
            }
        }
    }

    // (4): a full-range position sweep unlinks every reachable marked node;
    // afterwards none may remain reachable.
    let mut ctx = list.context();
    ctx.search(KEY_MAX - 1);
    walk_chain(list, &mut violations, |n, marked, violations| {
        if marked {
            violations.push(StructureViolation::MarkedReachable { key: n.key });
        }
    });

    violations
}
