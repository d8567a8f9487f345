//! Concurrent stress driver with optional history recording.
//!
//! Workers draw add/rem/con uniformly with keys in `[1, key_range]` from
//! per-thread seeded PRNGs. With recording on, every operation takes an
//! invoke and a respond stamp from one global sequentially consistent
//! counter, which totally orders the events soundly enough for the
//! brute-force checker. Recording does not consume PRNG draws, so the
//! operation stream is identical with recording on or off.

use std::sync::atomic::{AtomicU64, Ordering};

use super::history::{HistoryEvent, Op, Phase};
use super::linear::check_linearizable;
use super::structure::{check_structure, StructureViolation};
use crate::counters::Counters;
use crate::list::List;
use crate::variant::Variant;

#[derive(Debug, Clone)]
pub struct StressConfig {
    pub variant: Variant,
    pub threads: usize,
    pub ops_per_thread: u64,
    /// Keys are drawn from `1..=key_range`.
    pub key_range: u64,
    pub seed: u64,
    pub record: bool,
}

#[derive(Debug)]
pub struct StressOutcome {
    /// Stamp-ordered events; empty when recording was off.
    pub history: Vec<HistoryEvent>,
    pub counters: Counters,
    pub violations: Vec<StructureViolation>,
    /// Verdict of the linearizability checker, when recording was on and the
    /// history fits the checker bound.
    pub linearizable: Option<bool>,
}

pub fn stress(cfg: &StressConfig) -> StressOutcome {
    assert!(cfg.threads >= 1, "stress needs at least one thread");
    assert!(cfg.key_range >= 1, "stress needs a non-empty key range");
    let list = List::new(cfg.variant);
    let stamp = AtomicU64::new(0);

    let results: Vec<(Vec<HistoryEvent>, Counters)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|t| {
                let list = &list;
                let stamp = &stamp;
                s.spawn(move || {
                    let mut ctx = list.context_seeded(cfg.seed ^ t as u64);
                    let mut events = Vec::new();
                    for _ in 0..cfg.ops_per_thread {
                        let op = match ctx.rng().below(3) {
                            0 => Op::Add,
                            1 => Op::Rem,
                            _ => Op::Con,
                        };
                        let key = 1 + ctx.rng().below(cfg.key_range) as i64;
                        if cfg.record {
                            events.push(HistoryEvent {
                                thread: t,
                                op,
                                key,
                                phase: Phase::Invoke,
                                result: None,
                                stamp: stamp.fetch_add(1, Ordering::SeqCst),
                            });
                        }
                        let result = match op {
                            Op::Add => ctx.add(key).unwrap(),
                            Op::Rem => ctx.remove(key).unwrap(),
                            Op::Con => ctx.contains(key).unwrap(),
                        };
                        if cfg.record {
                            events.push(HistoryEvent {
                                thread: t,
                                op,
                                key,
                                phase: Phase::Respond,
                                result: Some(result),
                                stamp: stamp.fetch_add(1, Ordering::SeqCst),
                            });
                        }
                    }
                    (events, ctx.finish())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let counters = Counters::aggregate(results.iter().map(|(_, c)| c));
    let mut history: Vec<HistoryEvent> = results.into_iter().flat_map(|(e, _)| e).collect();
    history.sort_by_key(|e| e.stamp);

    let violations = check_structure(&list);
    let linearizable = if cfg.record {
        check_linearizable(&history).ok()
    } else {
        None
    };

    StressOutcome {
        history,
        counters,
        violations,
        linearizable,
    }
}
