//! Benchmark harness contracts: exact operation counts, deterministic
//! replayability of the random workload, and the CSV schema.

use std::collections::BTreeSet;

use lfol::bench::{
    csv_mean_row, csv_row, run, run_deterministic, run_random, BenchConfig, Benchmark, Mix,
    CSV_HEADER, PREFILL_SALT,
};
use lfol::rng::Rng;
use lfol::{List, Variant};

fn det_cfg(variant: Variant, benchmark: Benchmark, threads: usize, n: u64) -> BenchConfig {
    let mut cfg = BenchConfig::new(variant, benchmark);
    cfg.threads = threads;
    cfg.n = n;
    cfg
}

#[test]
fn single_thread_disjoint_add_remove_cycle() {
    for v in Variant::ALL {
        let cfg = det_cfg(v, Benchmark::DetDisjoint, 1, 3);
        let r = run_deterministic(&cfg).unwrap();
        assert_eq!(r.total_ops, 27, "{v}");
        assert_eq!(r.counters.adds, 3, "{v}");
        assert_eq!(r.counters.rems, 3, "{v}");
        assert_eq!(r.counters.fail, 0, "{v}");
        assert_eq!(r.counters.rtry, 0, "{v}");
    }
}

#[test]
fn phase_three_contains_all_fail_after_full_cycle() {
    // Replays the deterministic schedule by hand to observe the con results
    // the report cannot carry: after phase 2 removed everything, every
    // phase-3 con must be false.
    for v in Variant::ALL {
        let list = List::new(v);
        let mut ctx = list.context();
        let n = 3i64;
        for i in 0..n {
            assert!(!ctx.contains(i).unwrap());
            assert!(ctx.add(i).unwrap());
            assert!(ctx.contains(i).unwrap());
            assert!(!ctx.add(i).unwrap());
        }
        for i in (0..n).rev() {
            assert!(ctx.contains(i).unwrap());
            assert!(ctx.remove(i).unwrap());
            assert!(!ctx.contains(i).unwrap());
            assert!(!ctx.remove(i).unwrap());
        }
        for i in 0..n {
            assert!(!ctx.contains(i).unwrap(), "{v}: phase-3 con({i})");
        }
        drop(ctx);
        assert!(list.snapshot().is_empty(), "{v}");
    }
}

#[test]
fn disjoint_keys_make_outcomes_thread_local() {
    // Every first add/rem of a disjoint key succeeds, every second fails:
    // adds == rems == p*n exactly, for every variant.
    for v in Variant::ALL {
        let cfg = det_cfg(v, Benchmark::DetDisjoint, 2, 4);
        let r = run_deterministic(&cfg).unwrap();
        assert_eq!(r.total_ops, 9 * 2 * 4, "{v}");
        assert_eq!(r.counters.adds, 8, "{v}");
        assert_eq!(r.counters.rems, 8, "{v}");
    }
}

#[test]
fn shared_keys_conserve_adds_and_rems() {
    for v in Variant::ALL {
        let cfg = det_cfg(v, Benchmark::DetShared, 3, 50);
        let r = run_deterministic(&cfg).unwrap();
        assert_eq!(r.total_ops, 9 * 3 * 50, "{v}");
        // Phase 3 is read-only and threads free-run, so every successful add
        // is eventually removed.
        assert_eq!(r.counters.adds, r.counters.rems, "{v}");
    }
}

#[test]
fn random_mix_replays_against_the_oracle() {
    let mut cfg = BenchConfig::new(Variant::SinglyCursor, Benchmark::RandomMix);
    cfg.threads = 1;
    cfg.ops = 10_000;
    cfg.prefill = 100;
    cfg.key_range = 1000;
    cfg.mix = Mix::new(10, 10, 80);
    cfg.seed = 5;
    let r = run_random(&cfg).unwrap();
    assert_eq!(r.total_ops, 10_000);

    // Independent replay of the exact same PRNG streams against a sorted set.
    let mut set = BTreeSet::new();
    let mut prefill_rng = Rng::seeded(cfg.seed ^ PREFILL_SALT);
    let mut filled = 0;
    while filled < cfg.prefill {
        if set.insert(prefill_rng.below(cfg.key_range) as i64) {
            filled += 1;
        }
    }
    let mut worker_rng = Rng::seeded(cfg.seed); // thread 0: seed ^ 0
    let (mut adds, mut rems) = (0u64, 0u64);
    for _ in 0..cfg.ops {
        let draw = worker_rng.below(100);
        let key = worker_rng.below(cfg.key_range) as i64;
        if draw < 10 {
            adds += set.insert(key) as u64;
        } else if draw < 20 {
            rems += set.remove(&key) as u64;
        }
    }
    assert_eq!(r.counters.adds, adds);
    assert_eq!(r.counters.rems, rems);
    // adds - rems == |final set| - prefill
    assert_eq!(
        r.counters.adds - r.counters.rems,
        set.len() as u64 - cfg.prefill
    );
}

#[test]
fn saturated_read_only_mix_never_updates() {
    // Prefill the whole key range, then run contains only.
    let mut cfg = BenchConfig::new(Variant::Doubly, Benchmark::RandomMix);
    cfg.threads = 2;
    cfg.ops = 1000;
    cfg.prefill = 64;
    cfg.key_range = 64;
    cfg.mix = Mix::new(0, 0, 100);
    let r = run_random(&cfg).unwrap();
    assert_eq!(r.total_ops, 2000);
    assert_eq!(r.counters.adds, 0);
    assert_eq!(r.counters.rems, 0);
    assert!(r.counters.cons > 0);
}

#[test]
fn expected_total_ops_formulas() {
    let cfg = det_cfg(Variant::Draconic, Benchmark::DetShared, 64, 100_000);
    assert_eq!(cfg.expected_total_ops(), 57_600_000);
    let cfg = det_cfg(Variant::Draconic, Benchmark::DetDisjoint, 64, 10_000);
    assert_eq!(cfg.expected_total_ops(), 5_760_000);
    let mut cfg = BenchConfig::new(Variant::Draconic, Benchmark::RandomMix);
    cfg.threads = 64;
    cfg.ops = 1_000_000;
    assert_eq!(cfg.expected_total_ops(), 64_000_000);
}

#[test]
fn config_validation() {
    let mut cfg = BenchConfig::new(Variant::Singly, Benchmark::RandomMix);
    cfg.threads = 0;
    assert!(cfg.validate().is_err());

    let mut cfg = BenchConfig::new(Variant::Singly, Benchmark::RandomMix);
    cfg.mix = Mix::new(50, 40, 20);
    assert!(cfg.validate().is_err());

    let mut cfg = BenchConfig::new(Variant::Singly, Benchmark::RandomMix);
    cfg.prefill = 100;
    cfg.key_range = 99;
    assert!(cfg.validate().is_err());

    // Prefill of the full key range is allowed.
    let mut cfg = BenchConfig::new(Variant::Singly, Benchmark::RandomMix);
    cfg.prefill = 64;
    cfg.key_range = 64;
    assert!(cfg.validate().is_ok());

    let mut cfg = det_cfg(Variant::Singly, Benchmark::DetShared, 1, 0);
    cfg.n = 0;
    assert!(cfg.validate().is_err());

    assert!("10:10:80".parse::<Mix>().is_ok());
    assert!("10:10".parse::<Mix>().is_err());
    assert!("a:b:c".parse::<Mix>().is_err());
    assert!("det-shared".parse::<Benchmark>().is_ok());
    assert!("nope".parse::<Benchmark>().is_err());
}

/// Drops the two timing-dependent columns (time_ms, throughput_kops).
fn stable_columns(row: &str) -> Vec<&str> {
    row.split(',')
        .enumerate()
        .filter(|(i, _)| *i != 10 && *i != 12)
        .map(|(_, f)| f)
        .collect()
}

#[test]
fn csv_schema_and_determinism() {
    assert_eq!(CSV_HEADER.split(',').count(), 19);
    let mut cfg = BenchConfig::new(Variant::DoublyCursor, Benchmark::RandomMix);
    cfg.threads = 1;
    cfg.ops = 5000;
    cfg.prefill = 50;
    cfg.key_range = 256;
    cfg.mix = Mix::new(25, 25, 50);
    cfg.seed = 99;
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    let row_a = csv_row(&cfg, 0, &a);
    let row_b = csv_row(&cfg, 0, &b);
    assert_eq!(row_a.split(',').count(), 19);
    assert_eq!(stable_columns(&row_a), stable_columns(&row_b));

    let mean = csv_mean_row(&cfg, &[a, b]);
    assert_eq!(mean.split(',').count(), 19);
    assert_eq!(mean.split(',').nth(9), Some("-1"));
    // Counter means over identical runs equal the runs' values.
    assert_eq!(
        mean.split(',').nth(13).unwrap(),
        a.counters.adds.to_string()
    );

    // Deterministic benchmarks blank the random-only columns.
    let det = det_cfg(Variant::Draconic, Benchmark::DetShared, 1, 10);
    let r = run(&det).unwrap();
    let row = csv_row(&det, 0, &r);
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[3], "10"); // n
    assert_eq!(fields[4], "0"); // c unused
    assert_eq!(fields[7], "-"); // mix unused
}
