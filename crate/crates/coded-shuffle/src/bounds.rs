//! Closed-form evaluators for the optimal storage/rate tradeoffs and the
//! matching information-theoretic lower bounds.
//!
//! All evaluators work on exact rationals over the feasible storage range
//! `N/K <= S <= N`. The measured worst-case rate of every implemented scheme
//! equals the optimum exactly at its operating point, and the combined lower
//! bound is tight for K = 2 and K = 3.

use num_rational::Rational64;

use crate::error::{Error, Result};

fn rational(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn check_range(k: usize, n: usize, s: Rational64) -> Result<()> {
    let n_r = rational(n as i64);
    let min = n_r / rational(k as i64);
    if s < min || s > n_r {
        return Err(Error::StorageOutOfRange {
            k,
            n,
            storage: s,
            min,
            max: n_r,
        });
    }
    Ok(())
}

/// Optimal worst-case rate for two workers: `N - S` points.
pub fn opt_rate_k2(n: usize, s: Rational64) -> Result<Rational64> {
    check_range(2, n, s)?;
    Ok(rational(n as i64) - s)
}

/// Optimal worst-case rate for three workers: `7N/6 - 3S/2` up to S = 2N/3,
/// then `N/2 - S/2`.
pub fn opt_rate_k3(n: usize, s: Rational64) -> Result<Rational64> {
    check_range(3, n, s)?;
    let n_r = rational(n as i64);
    let two_thirds = n_r * Rational64::new(2, 3);
    if s <= two_thirds {
        Ok(n_r * Rational64::new(7, 6) - s * Rational64::new(3, 2))
    } else {
        Ok((n_r - s) / rational(2))
    }
}

/// Optimal worst-case rate for the supported worker counts.
pub fn opt_rate(k: usize, n: usize, s: Rational64) -> Result<Rational64> {
    match k {
        2 => opt_rate_k2(n, s),
        3 => opt_rate_k3(n, s),
        k => Err(Error::UnsupportedWorkerCount { k }),
    }
}

/// Cut-set style lower bound: `N - S` for two workers, `(N - S) / 2` for
/// three.
pub fn lower_bound_cutset(k: usize, n: usize, s: Rational64) -> Result<Rational64> {
    check_range(k, n, s)?;
    let gap = rational(n as i64) - s;
    match k {
        2 => Ok(gap),
        3 => Ok(gap / rational(2)),
        k => Err(Error::UnsupportedWorkerCount { k }),
    }
}

/// Excess-storage lower bound for three workers: `7N/6 - 3S/2`.
///
/// May go negative for large S; callers take the maximum with the cut-set
/// bound.
pub fn lower_bound_excess_k3(n: usize, s: Rational64) -> Result<Rational64> {
    check_range(3, n, s)?;
    Ok(rational(n as i64) * Rational64::new(7, 6) - s * Rational64::new(3, 2))
}

/// Pointwise maximum of the applicable lower bounds, clamped at zero.
pub fn combined_lower_bound(k: usize, n: usize, s: Rational64) -> Result<Rational64> {
    let mut best = lower_bound_cutset(k, n, s)?;
    if k == 3 {
        best = best.max(lower_bound_excess_k3(n, s)?);
    }
    Ok(best.max(rational(0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_worker_line() {
        assert_eq!(opt_rate_k2(4, rational(2)).unwrap(), rational(2));
        assert_eq!(opt_rate_k2(4, rational(4)).unwrap(), rational(0));
        assert_eq!(opt_rate_k2(6, rational(4)).unwrap(), rational(2));
        assert!(opt_rate_k2(4, rational(1)).is_err());
        assert!(opt_rate_k2(4, rational(5)).is_err());
    }

    #[test]
    fn three_worker_piecewise() {
        assert_eq!(opt_rate_k3(3, rational(2)).unwrap(), Rational64::new(1, 2));
        assert_eq!(opt_rate_k3(3, rational(1)).unwrap(), rational(2));
        assert_eq!(opt_rate_k3(6, rational(3)).unwrap(), Rational64::new(5, 2));
        assert_eq!(opt_rate_k3(6, rational(5)).unwrap(), Rational64::new(1, 2));
        assert_eq!(opt_rate_k3(3, rational(3)).unwrap(), rational(0));
        assert!(opt_rate_k3(3, Rational64::new(1, 2)).is_err());
    }

    #[test]
    fn cutset_bounds() {
        assert_eq!(lower_bound_cutset(2, 4, rational(2)).unwrap(), rational(2));
        assert_eq!(lower_bound_cutset(3, 3, rational(3)).unwrap(), rational(0));
        assert_eq!(lower_bound_cutset(3, 6, rational(4)).unwrap(), rational(1));
        assert!(matches!(
            lower_bound_cutset(5, 5, rational(3)),
            Err(Error::UnsupportedWorkerCount { k: 5 })
        ));
    }

    #[test]
    fn excess_bound_and_clamping() {
        assert_eq!(lower_bound_excess_k3(3, rational(1)).unwrap(), rational(2));
        assert_eq!(
            lower_bound_excess_k3(3, rational(2)).unwrap(),
            Rational64::new(1, 2)
        );
        // Negative raw value at S = N, clamped by the combined bound.
        assert_eq!(
            lower_bound_excess_k3(3, rational(3)).unwrap(),
            rational(-1)
        );
        assert_eq!(combined_lower_bound(3, 3, rational(3)).unwrap(), rational(0));
    }

    #[test]
    fn bounds_are_tight_across_the_range() {
        // The tradeoff is piecewise linear; checking a dense rational grid
        // pins the bound evaluators against the optimum everywhere.
        for n in [2usize, 4, 6] {
            for step in 0..=24 {
                let s = rational(n as i64 / 2)
                    + rational(n as i64 / 2) * Rational64::new(step, 24);
                assert_eq!(
                    combined_lower_bound(2, n, s).unwrap(),
                    opt_rate_k2(n, s).unwrap(),
                    "k=2 n={n} s={s}"
                );
            }
        }
        for n in [3usize, 6] {
            let third = rational(n as i64) / rational(3);
            for step in 0..=24 {
                let s = third + (rational(n as i64) - third) * Rational64::new(step, 24);
                assert_eq!(
                    combined_lower_bound(3, n, s).unwrap(),
                    opt_rate_k3(n, s).unwrap(),
                    "k=3 n={n} s={s}"
                );
            }
        }
    }

    #[test]
    fn three_worker_curve_is_convex_with_one_breakpoint() {
        let n = 6;
        let third = rational(2);
        let samples: Vec<Rational64> = (0..=36)
            .map(|i| third + (rational(6) - third) * Rational64::new(i, 36))
            .collect();
        let rates: Vec<Rational64> = samples
            .iter()
            .map(|&s| opt_rate_k3(n, s).unwrap())
            .collect();
        // Slopes never decrease in steepness reversal: successive differences
        // are non-decreasing for a convex piecewise-linear function.
        let diffs: Vec<Rational64> = rates.windows(2).map(|w| w[1] - w[0]).collect();
        for pair in diffs.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        // Exactly one slope change, at S = 2N/3 = 4.
        let distinct: std::collections::BTreeSet<Rational64> = diffs.into_iter().collect();
        assert_eq!(distinct.len(), 2);
    }
}
