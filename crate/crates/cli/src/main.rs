//! Benchmark and verification front end for the lfol list variants.
//!
//! Emits one CSV data row per run plus a mean row (`repeat=-1`) per
//! configuration, over the cross product of `--variant` and `--threads`.
//! Exit codes: 0 success, 1 post-run invariant violation (or a non-linearizable
//! `--replay` history), 2 bad flags or malformed input.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lfol::bench::{self, BenchConfig, BenchReport, Benchmark, Mix};
use lfol::verify::{check_linearizable, parse_history, CheckError};
use lfol::{fetch_or_is_native, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Parser, Debug)]
#[command(
    name = "lfol",
    about = "Lock-free ordered-list benchmarks",
    long_about = "Runs the deterministic worst-case or random operation-mix benchmark \
over the selected list variants and thread counts, writing CSV."
)]
struct Args {
    /// Variants to run: names or letters a-f, comma separated. Default: all six.
    #[arg(long, value_delimiter = ',')]
    variant: Vec<Variant>,

    /// Benchmark to run.
    #[arg(long = "bench", default_value = "random")]
    bench: Benchmark,

    /// Thread counts; a comma list sweeps one run per count.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,

    /// Per-phase sequence length (deterministic benchmarks).
    #[arg(long, default_value_t = 10_000)]
    n: u64,

    /// Operations per thread (random benchmark).
    #[arg(long, default_value_t = 50_000)]
    ops: u64,

    /// Prefilled items (random benchmark).
    #[arg(long, default_value_t = 16_384)]
    prefill: u64,

    /// Key range bound U; keys are drawn from [0, U) (random benchmark).
    #[arg(long = "keyrange", default_value_t = 32_768)]
    keyrange: u64,

    /// Operation mix add:rem:con in percent, summing to 100.
    #[arg(long, default_value = "25:25:50")]
    mix: Mix,

    /// Base PRNG seed; worker t uses seed^t. LFOL_SEED overrides this flag.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Runs per configuration; a mean row follows the data rows.
    #[arg(long, default_value_t = 1)]
    repeats: u32,

    /// Write CSV to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Pin worker threads to CPUs in natural order. Defaults to on where the
    /// platform exposes affinity.
    #[arg(long)]
    pin: Option<Toggle>,

    /// Print the implementation variants and exit.
    #[arg(long)]
    list_variants: bool,

    /// Replay a recorded history file through the linearizability checker.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse(); // exits 2 on bad flags
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn fail(code: u8, message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn run(args: Args) -> Result<(), ExitCode> {
    if args.list_variants {
        list_variants();
        return Ok(());
    }
    if let Some(path) = &args.replay {
        return replay(path);
    }

    let seed = match std::env::var("LFOL_SEED") {
        Ok(s) => s
            .parse::<u64>()
            .map_err(|e| fail(2, format!("LFOL_SEED `{s}`: {e}")))?,
        Err(_) => args.seed,
    };

    let variants: Vec<Variant> = if args.variant.is_empty() {
        Variant::ALL.to_vec()
    } else {
        args.variant.clone()
    };

    let pin = match args.pin {
        Some(Toggle::On) => {
            if !bench::pinning_supported() {
                eprintln!("note: thread pinning not supported on this platform; running unpinned");
            }
            true
        }
        Some(Toggle::Off) => false,
        None => bench::pinning_supported(),
    };

    // Validate every cell before running anything.
    let mut cells: Vec<BenchConfig> = Vec::new();
    for &variant in &variants {
        for &threads in &args.threads {
            let cfg = BenchConfig {
                variant,
                benchmark: args.bench,
                threads,
                n: args.n,
                ops: args.ops,
                prefill: args.prefill,
                key_range: args.keyrange,
                mix: args.mix,
                seed,
                repeats: args.repeats,
                pin,
            };
            cfg.validate().map_err(|e| fail(2, e.to_string()))?;
            cells.push(cfg);
        }
    }

    let mut out: BufWriter<Box<dyn Write>> = BufWriter::new(match &args.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    });
    let emit = |out: &mut BufWriter<Box<dyn Write>>, line: &str| -> Result<(), ExitCode> {
        writeln!(out, "{line}").map_err(|e| fail(1, format!("write failed: {e}")))
    };

    emit(&mut out, bench::CSV_HEADER)?;
    for cfg in &cells {
        let mut reports: Vec<BenchReport> = Vec::with_capacity(cfg.repeats as usize);
        for repeat in 0..cfg.repeats {
            let report = bench::run(cfg).map_err(|e| fail(2, e.to_string()))?;
            if report.total_ops != cfg.expected_total_ops() {
                // Flush what we have, then report the harness bug.
                let _ = out.flush();
                return Err(fail(
                    1,
                    format!(
                        "total_ops invariant violated for variant={} threads={}: ran {}, expected {}",
                        cfg.variant,
                        cfg.threads,
                        report.total_ops,
                        cfg.expected_total_ops()
                    ),
                ));
            }
            emit(&mut out, &bench::csv_row(cfg, repeat, &report))?;
            reports.push(report);
        }
        emit(&mut out, &bench::csv_mean_row(cfg, &reports))?;
    }
    out.flush().map_err(|e| fail(1, format!("write failed: {e}")))?;
    Ok(())
}

fn list_variants() {
    for v in Variant::ALL {
        println!("{}) {:<16} {}", v.letter(), v.name(), v.description());
    }
    println!(
        "fetch-or lowering on this target: {}",
        if fetch_or_is_native() {
            "native instruction"
        } else {
            "compare-exchange loop (emulated)"
        }
    );
}

fn replay(path: &PathBuf) -> Result<(), ExitCode> {
    let text =
        std::fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    let events = parse_history(&text).map_err(|e| fail(2, e.to_string()))?;
    match check_linearizable(&events) {
        Ok(true) => {
            println!("linearizable: yes ({} events)", events.len());
            Ok(())
        }
        Ok(false) => {
            println!("linearizable: NO");
            Err(ExitCode::from(1))
        }
        Err(e @ CheckError::TooLarge { .. }) => Err(fail(2, e.to_string())),
        Err(e) => Err(fail(2, e.to_string())),
    }
}
