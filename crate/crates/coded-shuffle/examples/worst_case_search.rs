//! Exhaustively measure the worst-case broadcast rate of every corner scheme
//! and compare it against the closed-form optimum. All comparisons are exact.
//!
//! ```bash
//! cargo run --release --example worst_case_search
//! ```

use coded_shuffle::{opt_rate, worst_case_search, Result, Scheme};

fn main() -> Result<()> {
    let cases: Vec<(Scheme, usize)> = vec![
        (Scheme::k2_min(4)?, 8),
        (Scheme::k2_min(6)?, 8),
        (Scheme::k3_min(3)?, 2),
        (Scheme::k3_min(6)?, 2),
        (Scheme::k3_two_thirds(3)?, 2),
        (Scheme::k3_two_thirds(6)?, 2),
        (Scheme::full_storage(3, 6)?, 2),
    ];

    println!(
        "{:<28} {:>6} {:>8} {:>10} {:>10}  argmax pair",
        "scheme", "pairs", "decoded", "measured", "optimal"
    );
    for (scheme, dim_bits) in cases {
        let report = worst_case_search(&scheme, dim_bits, 100_000)?;
        let optimal = opt_rate(
            scheme.k_workers(),
            scheme.n_points(),
            scheme.storage_points(),
        )?;
        assert_eq!(report.max_rate_points, optimal, "tradeoff must be exact");
        println!(
            "{:<28} {:>6} {:>8} {:>10} {:>10}  {} -> {}",
            scheme.name(),
            report.pairs_checked,
            report.all_decoded,
            report.max_rate_points.to_string(),
            optimal.to_string(),
            report.argmax_pair.0,
            report.argmax_pair.1
        );
    }
    println!();
    println!("every measured worst case equals the closed-form optimum exactly");
    Ok(())
}
