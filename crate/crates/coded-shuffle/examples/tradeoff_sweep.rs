//! Sweep the storage axis for three workers and print the measured worst-case
//! rate next to the theoretical optimum and the combined lower bound. The
//! three columns agree exactly at every point: the tradeoff is tight.
//!
//! ```bash
//! cargo run --release --example tradeoff_sweep
//! ```

use num_rational::Rational64;

use coded_shuffle::{
    combined_lower_bound, decimal_string, opt_rate, worst_case_search, Result, Scheme,
};

fn main() -> Result<()> {
    let (k, n, dim_bits, points) = (3usize, 6usize, 24usize, 9usize);
    let n_r = Rational64::from_integer(n as i64);
    let min = n_r / Rational64::from_integer(k as i64);
    let step = (n_r - min) / Rational64::from_integer((points - 1) as i64);

    println!("three workers, {n} points, {dim_bits} bits per point");
    println!(
        "{:>8} {:>10} {:>10} {:>12}  scheme",
        "S", "measured", "optimal", "lower bound"
    );
    for i in 0..points {
        let storage = min + step * Rational64::from_integer(i as i64);
        let scheme = Scheme::for_storage(k, n, storage)?;
        let report = worst_case_search(&scheme, dim_bits, 100_000)?;
        let optimal = opt_rate(k, n, storage)?;
        let bound = combined_lower_bound(k, n, storage)?;
        assert!(report.all_decoded);
        assert_eq!(report.max_rate_points, optimal);
        assert_eq!(report.max_rate_points, bound);
        println!(
            "{:>8} {:>10} {:>10} {:>12}  {}",
            decimal_string(storage),
            decimal_string(report.max_rate_points),
            decimal_string(optimal),
            decimal_string(bound),
            scheme.name()
        );
    }
    println!();
    println!("note the slope change at S = 2N/3: beyond it, extra storage buys");
    println!("less rate per point than the coded half-placement region does");
    Ok(())
}
