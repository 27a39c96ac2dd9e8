//! Command-line surface: seeded shuffle chains, exhaustive worst-case
//! searches, and storage-axis sweeps with CSV output.
//!
//! Exit codes: 0 on success, 1 when a protocol invariant is violated, 2 on
//! usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use crate::bounds::{combined_lower_bound, opt_rate};
use crate::error::{Error, Result};
use crate::harness::{run_chain, worst_case_search};
use crate::rate::decimal_string;
use crate::schemes::Scheme;

/// Coded data shuffling between a master node and K distributed workers.
#[derive(Parser, Debug)]
#[command(name = "coded-shuffle", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded chain of random shuffles and emit per-iteration rates.
    Run(RunArgs),
    /// Exhaustively search all shuffle pairs for the worst-case rate.
    Worstcase(WorstcaseArgs),
    /// Sweep the storage axis and compare measured, optimal, and lower-bound
    /// rates.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Number of workers (2 or 3).
    #[arg(long)]
    k: usize,
    /// Number of data points; must be divisible by k.
    #[arg(long)]
    n: usize,
    /// Bits per data point; must be even.
    #[arg(long)]
    d: usize,
    /// Per-worker storage in points, as a decimal or `p/q` rational.
    #[arg(long)]
    storage: String,
    /// Chain length.
    #[arg(long, default_value_t = 100)]
    iters: u64,
    /// Seed for the dataset and the shuffle draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force a specific corner scheme instead of auto-selection.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Add an exact `p/q` column to the CSV.
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct WorstcaseArgs {
    /// Number of workers (2 or 3).
    #[arg(long)]
    k: usize,
    /// Number of data points; must be divisible by k.
    #[arg(long)]
    n: usize,
    /// Bits per data point; must be even.
    #[arg(long)]
    d: usize,
    /// Per-worker storage in points, as a decimal or `p/q` rational.
    #[arg(long)]
    storage: String,
    /// Force a specific corner scheme instead of auto-selection.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Refuse enumerations beyond this many shuffle pairs.
    #[arg(long, default_value_t = 100_000)]
    max_pairs: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Number of workers (2 or 3).
    #[arg(long)]
    k: usize,
    /// Number of data points; must be divisible by k.
    #[arg(long)]
    n: usize,
    /// Bits per data point; must be even.
    #[arg(long)]
    d: usize,
    /// Number of evenly spaced storage values from N/K to N (at least 2).
    #[arg(long)]
    points: usize,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add exact `p/q` columns to the CSV.
    #[arg(long)]
    exact: bool,
    /// Refuse enumerations beyond this many shuffle pairs.
    #[arg(long, default_value_t = 100_000)]
    max_pairs: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    FullStorage,
    K2Min,
    K3Min,
    K3TwoThirds,
}

/// One row of the sweep output; all columns are exact rationals.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub storage_points: Rational64,
    pub measured_worst_rate: Rational64,
    pub theoretical_opt_rate: Rational64,
    pub combined_lower_bound: Rational64,
}

/// Parse a storage value written as an integer, a decimal, or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let bad = || Error::BadRational {
        text: text.to_string(),
    };
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_mag: i64 = match whole.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let scale = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let frac_mag: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = Rational64::new(whole_mag * scale + frac_mag, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    t.parse::<i64>()
        .map(Rational64::from_integer)
        .map_err(|_| bad())
}

/// Parse arguments and run; translates errors into the documented exit codes.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Worstcase(args) => cmd_worstcase(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_protocol_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn select_scheme(
    k: usize,
    n: usize,
    storage_text: &str,
    forced: Option<SchemeArg>,
) -> Result<Scheme> {
    let storage = parse_rational(storage_text)?;
    match forced {
        None => Scheme::for_storage(k, n, storage),
        Some(arg) => {
            let scheme = match arg {
                SchemeArg::FullStorage => Scheme::full_storage(k, n)?,
                SchemeArg::K2Min => {
                    require_k(k, 2)?;
                    Scheme::k2_min(n)?
                }
                SchemeArg::K3Min => {
                    require_k(k, 3)?;
                    Scheme::k3_min(n)?
                }
                SchemeArg::K3TwoThirds => {
                    require_k(k, 3)?;
                    Scheme::k3_two_thirds(n)?
                }
            };
            if scheme.storage_points() != storage {
                return Err(Error::SchemeMismatch {
                    expected: format!(
                        "storage {} points for scheme {}",
                        scheme.storage_points(),
                        scheme.name()
                    ),
                    actual: format!("{storage}"),
                });
            }
            Ok(scheme)
        }
    }
}

fn require_k(actual: usize, needed: usize) -> Result<()> {
    if actual != needed {
        return Err(Error::SchemeMismatch {
            expected: format!("k={needed}"),
            actual: format!("k={actual}"),
        });
    }
    Ok(())
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let scheme = select_scheme(args.k, args.n, &args.storage, args.scheme)?;
    scheme.validate_dims(args.d)?;
    let records = run_chain(&scheme, args.d, args.seed, args.iters)?;

    let mut csv = String::new();
    csv.push_str("iter,rate_bits,rate_points");
    if args.exact {
        csv.push_str(",rate_points_exact");
    }
    csv.push('\n');
    for record in &records {
        csv.push_str(&format!(
            "{},{},{}",
            record.iteration,
            record.rate_bits,
            decimal_string(record.rate_points)
        ));
        if args.exact {
            csv.push_str(&format!(",{}", record.rate_points));
        }
        csv.push('\n');
    }
    write_output(args.out.as_ref(), &csv)
}

fn cmd_worstcase(args: WorstcaseArgs) -> Result<()> {
    let scheme = select_scheme(args.k, args.n, &args.storage, args.scheme)?;
    scheme.validate_dims(args.d)?;
    let report = worst_case_search(&scheme, args.d, args.max_pairs)?;

    println!("scheme: {scheme}");
    println!("pairs checked: {}", report.pairs_checked);
    println!(
        "max rate: {} points ({}) = {} bits",
        report.max_rate_points,
        decimal_string(report.max_rate_points),
        report.max_rate_bits
    );
    println!(
        "argmax pair: {} -> {}",
        report.argmax_pair.0, report.argmax_pair.1
    );
    println!("all decoded: {}", report.all_decoded);
    if let Some((from, to)) = &report.first_failure {
        println!("first failing pair: {from} -> {to}");
    }
    if !report.all_decoded {
        return Err(Error::invariant(
            "decodability",
            "at least one shuffle pair failed to decode",
        ));
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.points < 2 {
        return Err(Error::BadAssignment {
            reason: format!("--points must be at least 2, got {}", args.points),
        });
    }
    let n = Rational64::from_integer(args.n as i64);
    let min = n / Rational64::from_integer(args.k as i64);
    let step = (n - min) / Rational64::from_integer((args.points - 1) as i64);

    // Validate the whole grid before measuring anything, so an unrealizable
    // sweep point is reported by name up front.
    let mut grid = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let storage = min + step * Rational64::from_integer(i as i64);
        let scheme = Scheme::for_storage(args.k, args.n, storage)?;
        scheme.validate_dims(args.d).map_err(|err| Error::SliceDivisibility {
            width: args.d,
            reason: format!("sweep point S={} is not realizable: {err}", decimal_string(storage)),
        })?;
        grid.push((storage, scheme));
    }

    let mut rows = Vec::with_capacity(grid.len());
    for (storage, scheme) in grid {
        let report = worst_case_search(&scheme, args.d, args.max_pairs)?;
        if !report.all_decoded {
            return Err(Error::invariant(
                "decodability",
                format!("scheme {} failed to decode during the sweep", scheme.name()),
            ));
        }
        rows.push(SweepRow {
            storage_points: storage,
            measured_worst_rate: report.max_rate_points,
            theoretical_opt_rate: opt_rate(args.k, args.n, storage)?,
            combined_lower_bound: combined_lower_bound(args.k, args.n, storage)?,
        });
    }

    let mut csv = String::new();
    csv.push_str("S,measured,optimal,lower_bound");
    if args.exact {
        csv.push_str(",S_exact,measured_exact,optimal_exact,lower_bound_exact");
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}",
            decimal_string(row.storage_points),
            decimal_string(row.measured_worst_rate),
            decimal_string(row.theoretical_opt_rate),
            decimal_string(row.combined_lower_bound)
        ));
        if args.exact {
            csv.push_str(&format!(
                ",{},{},{},{}",
                row.storage_points,
                row.measured_worst_rate,
                row.theoretical_opt_rate,
                row.combined_lower_bound
            ));
        }
        csv.push('\n');
    }
    write_output(args.out.as_ref(), &csv)
}
