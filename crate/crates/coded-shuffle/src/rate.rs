//! Broadcast messages and exact rate accounting.
//!
//! Rates are tracked as exact integers (bits) and exact rationals (points,
//! i.e. bits divided by the point dimension d). There is no floating point
//! anywhere in rate accounting, so optimality checks are equalities rather
//! than tolerances.

use num_rational::Rational64;

use crate::bits::Bits;
use crate::shuffle::Shuffle;

/// The broadcast payload for one shuffle transition.
///
/// The shuffle descriptors themselves are ambient side information known to
/// every party; only the payload bits count toward the communication rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    payload: Bits,
    from: Shuffle,
    to: Shuffle,
}

impl Message {
    pub fn new(payload: Bits, from: Shuffle, to: Shuffle) -> Self {
        Message { payload, from, to }
    }

    pub fn payload(&self) -> &Bits {
        &self.payload
    }

    pub fn length_bits(&self) -> u64 {
        self.payload.len() as u64
    }

    /// Rate in points: `length_bits / dim_bits`.
    pub fn rate_points(&self, dim_bits: usize) -> Rational64 {
        Rational64::new(self.payload.len() as i64, dim_bits as i64)
    }

    /// The shuffle pair this message was encoded for.
    pub fn transition(&self) -> (&Shuffle, &Shuffle) {
        (&self.from, &self.to)
    }
}

/// One step's rate in a simulation history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateRecord {
    pub iteration: u64,
    pub rate_bits: u64,
    pub rate_points: Rational64,
    pub from: Shuffle,
    pub to: Shuffle,
}

impl RateRecord {
    pub fn new(iteration: u64, rate_bits: u64, dim_bits: usize, from: Shuffle, to: Shuffle) -> Self {
        RateRecord {
            iteration,
            rate_bits,
            rate_points: Rational64::new(rate_bits as i64, dim_bits as i64),
            from,
            to,
        }
    }
}

/// Deterministic decimal rendering of an exact rational.
///
/// Terminating decimals are printed exactly with no trailing zeros ("2",
/// "2.5", "0.015625"); non-terminating ones are rounded half-away-from-zero
/// to a fixed six fractional digits ("0.666667").
pub fn decimal_string(r: Rational64) -> String {
    let negative = *r.numer() < 0;
    let num = r.numer().unsigned_abs() as u128;
    let den = *r.denom() as u128; // Ratio keeps the denominator positive.
    let sign = if negative { "-" } else { "" };

    let int = num / den;
    let rem = num % den;
    if rem == 0 {
        return format!("{sign}{int}");
    }

    let mut odd_part = den;
    while odd_part.is_multiple_of(2) {
        odd_part /= 2;
    }
    while odd_part.is_multiple_of(5) {
        odd_part /= 5;
    }

    if odd_part == 1 {
        let mut digits = String::new();
        let mut rem = rem;
        while rem != 0 {
            rem *= 10;
            digits.push(char::from(b'0' + (rem / den) as u8));
            rem %= den;
        }
        format!("{sign}{int}.{digits}")
    } else {
        let scaled = rem * 1_000_000;
        let mut frac = scaled / den;
        if (scaled % den) * 2 >= den {
            frac += 1;
        }
        let mut int = int;
        if frac == 1_000_000 {
            int += 1;
            frac = 0;
        }
        format!("{sign}{int}.{frac:06}")
    }
}
