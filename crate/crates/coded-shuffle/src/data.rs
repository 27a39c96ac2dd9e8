//! The master node's dataset: N points of d bits each.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// The ground-truth payload matrix held by the master node.
///
/// Every point has exactly `dim_bits` bits, and `dim_bits` is even so that a
/// point can be split into two equal halves. Payloads are immutable for the
/// lifetime of a simulation; workers are verified against them bit for bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    points: Vec<Bits>,
    dim_bits: usize,
}

impl Dataset {
    /// `n_points` points of `dim_bits` pseudorandom bits, reproducible from
    /// `seed`.
    pub fn random(n_points: usize, dim_bits: usize, seed: u64) -> Result<Self> {
        check_dims(n_points, dim_bits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..n_points)
            .map(|_| Bits::random(&mut rng, dim_bits))
            .collect();
        Ok(Dataset { points, dim_bits })
    }

    /// Build from explicit payloads. All points must share one even length.
    pub fn from_points(points: Vec<Bits>) -> Result<Self> {
        let dim_bits = points.first().map(Bits::len).unwrap_or(0);
        check_dims(points.len(), dim_bits)?;
        if points.iter().any(|p| p.len() != dim_bits) {
            return Err(Error::BadDimension { dim_bits });
        }
        Ok(Dataset { points, dim_bits })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn dim_bits(&self) -> usize {
        self.dim_bits
    }

    /// Total payload size in bits.
    pub fn total_bits(&self) -> u64 {
        self.points.len() as u64 * self.dim_bits as u64
    }

    /// Full payload of one point.
    pub fn point(&self, id: usize) -> &Bits {
        &self.points[id]
    }

    /// Copy of dimension range `[lo, hi)` of one point.
    pub fn point_slice(&self, id: usize, lo: usize, hi: usize) -> Bits {
        self.points[id].slice(lo, hi)
    }
}

fn check_dims(n_points: usize, dim_bits: usize) -> Result<()> {
    if n_points == 0 {
        return Err(Error::EmptyDataset);
    }
    if dim_bits < 2 || !dim_bits.is_multiple_of(2) {
        return Err(Error::BadDimension { dim_bits });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_add_up() {
        let d = Dataset::random(3, 2, 7).unwrap();
        assert_eq!(d.n_points(), 3);
        assert_eq!(d.dim_bits(), 2);
        assert_eq!(d.total_bits(), 6);

        let d = Dataset::random(4, 16, 0).unwrap();
        assert_eq!(d.total_bits(), 64);
    }

    #[test]
    fn same_seed_same_payloads() {
        let a = Dataset::random(5, 8, 123).unwrap();
        let b = Dataset::random(5, 8, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = Dataset::random(4, 16, 1).unwrap();
        let b = Dataset::random(4, 16, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn rejects_odd_or_tiny_dimensions() {
        assert!(matches!(
            Dataset::random(3, 3, 0),
            Err(Error::BadDimension { dim_bits: 3 })
        ));
        assert!(matches!(
            Dataset::random(3, 0, 0),
            Err(Error::BadDimension { .. })
        ));
        assert!(matches!(Dataset::random(0, 4, 0), Err(Error::EmptyDataset)));
    }

    #[test]
    fn point_slice_matches_full_point() {
        let d = Dataset::random(2, 8, 9).unwrap();
        let full = d.point(1);
        let joined = crate::bits::Bits::concat([&d.point_slice(1, 0, 5), &d.point_slice(1, 5, 8)]);
        assert_eq!(&joined, full);
    }
}
