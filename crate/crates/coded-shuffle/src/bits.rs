//! Fixed-length bit vectors and the XOR combinator every delivery scheme is
//! built on.
//!
//! All payloads in this crate (data points, point halves, broadcast messages)
//! are plain bit strings. [`xor_fold`] combines any number of them by bitwise
//! XOR after zero-padding each operand at the tail to the longest length, so
//! shorter operands are left-aligned. Lengths are always tracked exactly; the
//! reported communication rate is just the bit length of a message.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use rand::Rng;

use crate::error::{Error, Result};

/// An immutable-by-convention bit string of exact length.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits {
    raw: BitVec,
}

impl Bits {
    /// All-zero bit string of the given length.
    pub fn zeros(len: usize) -> Self {
        Bits {
            raw: bitvec![0; len],
        }
    }

    /// `len` independent fair coin flips from `rng`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut raw = BitVec::with_capacity(len);
        for _ in 0..len {
            raw.push(rng.random::<bool>());
        }
        Bits { raw }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut raw = BitVec::with_capacity(bits.len());
        raw.extend(bits.iter().copied());
        Bits { raw }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Bit at `idx`. Panics when out of range.
    pub fn get(&self, idx: usize) -> bool {
        self.raw[idx]
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        self.raw.set(idx, value);
    }

    /// Copy of the half-open bit range `[lo, hi)`. Panics on a bad range.
    pub fn slice(&self, lo: usize, hi: usize) -> Bits {
        assert!(lo <= hi && hi <= self.len(), "bad bit range {lo}..{hi}");
        Bits {
            raw: self.raw[lo..hi].to_bitvec(),
        }
    }

    /// Append all bits of `other`.
    pub fn extend(&mut self, other: &Bits) {
        self.raw.extend_from_bitslice(&other.raw);
    }

    /// Concatenate parts in iteration order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Bits>) -> Bits {
        let mut out = Bits::default();
        for p in parts {
            out.extend(p);
        }
        out
    }
}

/// Bitwise XOR of all operands, zero-padded at the tail to the longest one.
///
/// The result length equals the maximum operand length; operands are
/// left-aligned. Panics when `operands` is empty.
pub fn xor_fold(operands: &[&Bits]) -> Bits {
    assert!(!operands.is_empty(), "xor_fold needs at least one operand");
    let len = operands.iter().map(|b| b.len()).max().unwrap();
    let mut out = Bits::zeros(len);
    for op in operands {
        for i in 0..op.len() {
            let flipped = out.get(i) ^ op.get(i);
            out.set(i, flipped);
        }
    }
    out
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.raw.iter().by_vals() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        let mut raw = BitVec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => raw.push(false),
                '1' => raw.push(true),
                _ => {
                    return Err(Error::BadAssignment {
                        reason: format!("'{c}' is not a bit"),
                    })
                }
            }
        }
        Ok(Bits { raw })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn xor_of_equal_lengths() {
        let out = xor_fold(&[&bits("1010"), &bits("0110")]);
        assert_eq!(out, bits("1100"));
    }

    #[test]
    fn shorter_operand_is_tail_padded() {
        // "01" left-aligned against "1010" behaves like "0100".
        let out = xor_fold(&[&bits("1010"), &bits("01")]);
        assert_eq!(out, bits("1110"));
    }

    #[test]
    fn xor_with_itself_is_zero() {
        let v = bits("110101");
        assert_eq!(xor_fold(&[&v, &v]), Bits::zeros(6));
    }

    #[test]
    fn slice_and_concat_round_trip() {
        let v = bits("110010");
        let lo = v.slice(0, 3);
        let hi = v.slice(3, 6);
        assert_eq!(Bits::concat([&lo, &hi]), v);
    }

    #[test]
    fn display_matches_parse() {
        let v = bits("10011");
        assert_eq!(v.to_string(), "10011");
    }

    proptest! {
        #[test]
        fn fold_is_commutative(a in proptest::collection::vec(any::<bool>(), 0..48),
                               b in proptest::collection::vec(any::<bool>(), 0..48)) {
            let (a, b) = (Bits::from_bools(&a), Bits::from_bools(&b));
            prop_assert_eq!(xor_fold(&[&a, &b]), xor_fold(&[&b, &a]));
        }

        #[test]
        fn fold_is_associative(a in proptest::collection::vec(any::<bool>(), 0..48),
                               b in proptest::collection::vec(any::<bool>(), 0..48),
                               c in proptest::collection::vec(any::<bool>(), 0..48)) {
            let (a, b, c) = (Bits::from_bools(&a), Bits::from_bools(&b), Bits::from_bools(&c));
            let left = xor_fold(&[&xor_fold(&[&a, &b]), &c]);
            let right = xor_fold(&[&a, &xor_fold(&[&b, &c])]);
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&left, &xor_fold(&[&a, &b, &c]));
        }

        #[test]
        fn fold_is_self_inverse(a in proptest::collection::vec(any::<bool>(), 0..48),
                                b in proptest::collection::vec(any::<bool>(), 0..48)) {
            let (a, b) = (Bits::from_bools(&a), Bits::from_bools(&b));
            // XORing b in twice recovers a, padded to the common length.
            let twice = xor_fold(&[&xor_fold(&[&a, &b]), &b]);
            let padded_a = xor_fold(&[&a, &Bits::zeros(a.len().max(b.len()))]);
            prop_assert_eq!(twice, padded_a);
        }

        #[test]
        fn fold_length_is_max(a in proptest::collection::vec(any::<bool>(), 0..48),
                              b in proptest::collection::vec(any::<bool>(), 0..48)) {
            let (a, b) = (Bits::from_bools(&a), Bits::from_bools(&b));
            prop_assert_eq!(xor_fold(&[&a, &b]).len(), a.len().max(b.len()));
        }
    }
}
