//! The two instrumented benchmarks and their CSV reporting.
//!
//! * Deterministic worst case: starting from an empty list, every thread runs
//!   three key sequences of length `n` - `con/add/con/add` ascending,
//!   `con/rem/con/rem` descending, then a final ascending `con` pass - either
//!   over a private key progression (`t + i*p`, disjoint) or with all threads
//!   hammering the same keys (`i`, shared). Threads free-run; there are no
//!   barriers between phases.
//! * Random operation mix: the list is prefilled with exactly `prefill`
//!   distinct uniform keys (excluded from timing and counters), then each
//!   thread performs `ops` operations drawn add/rem/con by the configured mix
//!   with keys uniform in `[0, key_range)`.
//!
//! Timing covers the parallel region only, from the start barrier's release to
//! the last worker's completion. Worker `t` seeds its PRNG with
//! `seed ^ t`; the prefill stream is salted so it differs from worker 0's.

use std::fmt;
use std::sync::Barrier;
use std::time::Instant;

use crate::counters::Counters;
use crate::list::List;
use crate::variant::Variant;

/// Salt for the prefill PRNG stream (`seed ^ 0` would alias worker 0).
/// Public so that tests can replay the exact prefill sequence.
pub const PREFILL_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    DetShared,
    DetDisjoint,
    RandomMix,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::DetShared => "det-shared",
            Benchmark::DetDisjoint => "det-disjoint",
            Benchmark::RandomMix => "random",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Benchmark {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "det-shared" => Ok(Benchmark::DetShared),
            "det-disjoint" => Ok(Benchmark::DetDisjoint),
            "random" => Ok(Benchmark::RandomMix),
            other => Err(ConfigError(format!("unknown benchmark `{other}`"))),
        }
    }
}

/// Operation mix in percent; must sum to 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mix {
    pub add: u32,
    pub rem: u32,
    pub con: u32,
}

impl Mix {
    pub fn new(add: u32, rem: u32, con: u32) -> Mix {
        Mix { add, rem, con }
    }
}

impl fmt::Display for Mix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.add, self.rem, self.con)
    }
}

impl std::str::FromStr for Mix {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError(format!("mix `{s}` is not of the form a:r:c")));
        }
        let nums: Result<Vec<u32>, _> = parts.iter().map(|p| p.parse::<u32>()).collect();
        match nums {
            Ok(v) => Ok(Mix::new(v[0], v[1], v[2])),
            Err(_) => Err(ConfigError(format!("mix `{s}` has a non-numeric component"))),
        }
    }
}

/// Invalid benchmark configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub variant: Variant,
    pub benchmark: Benchmark,
    /// Worker thread count `p`.
    pub threads: usize,
    /// Per-phase sequence length `n` (deterministic benchmarks).
    pub n: u64,
    /// Operations per thread `c` (random benchmark).
    pub ops: u64,
    /// Prefill size `f` (random benchmark).
    pub prefill: u64,
    /// Key range bound `U`; keys are drawn from `[0, U)` (random benchmark).
    pub key_range: u64,
    pub mix: Mix,
    pub seed: u64,
    /// Runs to average; consumed by the CLI, identical seed per run.
    pub repeats: u32,
    /// Pin worker `t` to CPU `t` (best effort, Linux only).
    pub pin: bool,
}

impl BenchConfig {
    /// Defaults mirror the scalability experiment settings.
    pub fn new(variant: Variant, benchmark: Benchmark) -> BenchConfig {
        BenchConfig {
            variant,
            benchmark,
            threads: 1,
            n: 10_000,
            ops: 50_000,
            prefill: 16_384,
            key_range: 32_768,
            mix: Mix::new(25, 25, 50),
            seed: 1,
            repeats: 1,
            pin: pinning_supported(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.threads == 0 {
            return Err(ConfigError("thread count must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(ConfigError("repeats must be at least 1".into()));
        }
        match self.benchmark {
            Benchmark::DetShared | Benchmark::DetDisjoint => {
                if self.n == 0 {
                    return Err(ConfigError("n must be at least 1".into()));
                }
            }
            Benchmark::RandomMix => {
                if self.key_range == 0 {
                    return Err(ConfigError("key range must be at least 1".into()));
                }
                if self.prefill > self.key_range {
                    return Err(ConfigError(format!(
                        "prefill {} exceeds key range {}",
                        self.prefill, self.key_range
                    )));
                }
                if self.mix.add + self.mix.rem + self.mix.con != 100 {
                    return Err(ConfigError(format!("mix {} does not sum to 100", self.mix)));
                }
            }
        }
        Ok(())
    }

    /// Closed-form operation count: `9*p*n` deterministic, `p*c` random.
    pub fn expected_total_ops(&self) -> u64 {
        match self.benchmark {
            Benchmark::DetShared | Benchmark::DetDisjoint => 9 * self.threads as u64 * self.n,
            Benchmark::RandomMix => self.threads as u64 * self.ops,
        }
    }
}

/// One benchmark run's timing and aggregated counters.
#[derive(Debug, Clone, Copy)]
pub struct BenchReport {
    pub time_ms: f64,
    pub total_ops: u64,
    /// `total_ops / time_ms`, i.e. thousands of operations per second.
    pub throughput_kops: f64,
    pub counters: Counters,
}

/// Runs the configured benchmark once.
pub fn run(cfg: &BenchConfig) -> Result<BenchReport, ConfigError> {
    match cfg.benchmark {
        Benchmark::DetShared | Benchmark::DetDisjoint => run_deterministic(cfg),
        Benchmark::RandomMix => run_random(cfg),
    }
}

pub fn run_deterministic(cfg: &BenchConfig) -> Result<BenchReport, ConfigError> {
    cfg.validate()?;
    if cfg.benchmark == Benchmark::RandomMix {
        return Err(ConfigError("run_deterministic called with the random benchmark".into()));
    }
    let list = List::new(cfg.variant);
    let report = run_workers(&list, cfg, |list, t| {
        let mut ctx = list.context();
        let p = cfg.threads as u64;
        let n = cfg.n;
        let key = |i: u64| -> i64 {
            match cfg.benchmark {
                Benchmark::DetShared => i as i64,
                Benchmark::DetDisjoint => (t as u64 + i * p) as i64,
                Benchmark::RandomMix => unreachable!(),
            }
        };
        let mut ops = 0u64;
        for i in 0..n {
            let k = key(i);
            ctx.contains(k).unwrap();
            ctx.add(k).unwrap();
            ctx.contains(k).unwrap();
            ctx.add(k).unwrap();
            ops += 4;
        }
        for i in (0..n).rev() {
            let k = key(i);
            ctx.contains(k).unwrap();
            ctx.remove(k).unwrap();
            ctx.contains(k).unwrap();
            ctx.remove(k).unwrap();
            ops += 4;
        }
        for i in 0..n {
            ctx.contains(key(i)).unwrap();
            ops += 1;
        }
        (ctx.finish(), ops)
    });
    Ok(report)
}

pub fn run_random(cfg: &BenchConfig) -> Result<BenchReport, ConfigError> {
    cfg.validate()?;
    if cfg.benchmark != Benchmark::RandomMix {
        return Err(ConfigError("run_random called with a deterministic benchmark".into()));
    }
    let list = List::new(cfg.variant);
    {
        // Prefill to exactly `prefill` distinct keys; counters discarded.
        let mut ctx = list.context_seeded(cfg.seed ^ PREFILL_SALT);
        let mut filled = 0;
        while filled < cfg.prefill {
            let k = ctx.rng().below(cfg.key_range) as i64;
            if ctx.add(k).unwrap() {
                filled += 1;
            }
        }
    }
    let report = run_workers(&list, cfg, |list, t| {
        let mut ctx = list.context_seeded(cfg.seed ^ t as u64);
        let add_bound = cfg.mix.add as u64;
        let upd_bound = (cfg.mix.add + cfg.mix.rem) as u64;
        for _ in 0..cfg.ops {
            let draw = ctx.rng().below(100);
            let key = ctx.rng().below(cfg.key_range) as i64;
            if draw < add_bound {
                ctx.add(key).unwrap();
            } else if draw < upd_bound {
                ctx.remove(key).unwrap();
            } else {
                ctx.contains(key).unwrap();
            }
        }
        (ctx.finish(), cfg.ops)
    });
    Ok(report)
}

/// Spawns `p` workers against `list`, releases them through a start barrier,
/// and times the parallel region up to the last join.
fn run_workers<F>(list: &List, cfg: &BenchConfig, worker: F) -> BenchReport
where
    F: Fn(&List, usize) -> (Counters, u64) + Sync,
{
    let barrier = Barrier::new(cfg.threads + 1);
    let worker = &worker;
    let (elapsed, results) = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|t| {
                let barrier = &barrier;
                s.spawn(move || {
                    if cfg.pin {
                        pin_to_cpu(t);
                    }
                    barrier.wait();
                    worker(list, t)
                })
            })
            .collect();
        barrier.wait();
        let start = Instant::now();
        let results: Vec<(Counters, u64)> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        (start.elapsed(), results)
    });
    let counters = Counters::aggregate(results.iter().map(|(c, _)| c));
    let total_ops: u64 = results.iter().map(|(_, n)| n).sum();
    let time_ms = elapsed.as_secs_f64() * 1e3;
    BenchReport {
        time_ms,
        total_ops,
        throughput_kops: total_ops as f64 / time_ms,
        counters,
    }
}

/// Whether this build can pin threads to CPUs.
pub fn pinning_supported() -> bool {
    cfg!(target_os = "linux")
}

#[cfg(target_os = "linux")]
fn pin_to_cpu(worker: usize) -> bool {
    let cpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        libc::CPU_SET(worker % cpus, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_to_cpu(_worker: usize) -> bool {
    false
}

/// Fixed, versioned CSV schema shared by the library tests and the CLI.
pub const CSV_HEADER: &str = "variant,benchmark,threads,n,c,prefill,keyrange,mix,seed,repeat,\
time_ms,total_ops,throughput_kops,adds,rems,cons,trav,fail,rtry";

fn csv_prefix(cfg: &BenchConfig) -> String {
    let random = cfg.benchmark == Benchmark::RandomMix;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        cfg.variant,
        cfg.benchmark,
        cfg.threads,
        if random { 0 } else { cfg.n },
        if random { cfg.ops } else { 0 },
        if random { cfg.prefill } else { 0 },
        if random { cfg.key_range } else { 0 },
        if random { cfg.mix.to_string() } else { "-".to_string() },
        cfg.seed,
    )
}

/// One data row. `repeat` is the zero-based run index.
pub fn csv_row(cfg: &BenchConfig, repeat: u32, r: &BenchReport) -> String {
    let c = r.counters;
    format!(
        "{},{},{:.3},{},{:.2},{},{},{},{},{},{}",
        csv_prefix(cfg),
        repeat,
        r.time_ms,
        r.total_ops,
        r.throughput_kops,
        c.adds,
        c.rems,
        c.cons,
        c.trav,
        c.fail,
        c.rtry
    )
}

/// Mean row over a configuration's repeats, tagged `repeat=-1`.
pub fn csv_mean_row(cfg: &BenchConfig, reports: &[BenchReport]) -> String {
    let k = reports.len() as f64;
    let mean = |f: &dyn Fn(&BenchReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
    format!(
        "{},-1,{:.3},{},{:.2},{},{},{},{},{},{}",
        csv_prefix(cfg),
        mean(&|r| r.time_ms),
        mean(&|r| r.total_ops as f64),
        mean(&|r| r.throughput_kops),
        mean(&|r| r.counters.adds as f64),
        mean(&|r| r.counters.rems as f64),
        mean(&|r| r.counters.cons as f64),
        mean(&|r| r.counters.trav as f64),
        mean(&|r| r.counters.fail as f64),
        mean(&|r| r.counters.rtry as f64)
    )
}
