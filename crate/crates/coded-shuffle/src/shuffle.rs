//! Labeled equal partitions of point ids into per-worker batches.
//!
//! A shuffle assigns each of the N point ids to one of K workers so that every
//! worker receives exactly N/K points. Shuffles are the ambient side
//! information of the protocol: master and workers all know the current and
//! next assignment, and message contents are indexed by the pair.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Default cap on how many shuffles an exhaustive enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000;

/// A labeled equal partition of `{0..N-1}` into K batches.
///
/// Ordering is lexicographic on the assignment vector, which fixes the
/// deterministic enumeration order and worst-case tie-breaking.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shuffle {
    assignment: Vec<usize>,
    k_workers: usize,
}

impl Shuffle {
    /// Validate and wrap an explicit assignment vector.
    pub fn new(assignment: Vec<usize>, k_workers: usize) -> Result<Self> {
        let n = assignment.len();
        if k_workers == 0 || n == 0 || !n.is_multiple_of(k_workers) {
            return Err(Error::UnevenBatches { n, k: k_workers });
        }
        let batch = n / k_workers;
        let mut counts = vec![0usize; k_workers];
        for (point, &w) in assignment.iter().enumerate() {
            if w >= k_workers {
                return Err(Error::BadAssignment {
                    reason: format!("point {point} assigned to worker {w} >= k={k_workers}"),
                });
            }
            counts[w] += 1;
        }
        if counts.iter().any(|&c| c != batch) {
            return Err(Error::BadAssignment {
                reason: format!("batch sizes {counts:?} are not all {batch}"),
            });
        }
        Ok(Shuffle {
            assignment,
            k_workers,
        })
    }

    /// The block assignment: points `[w*N/K, (w+1)*N/K)` go to worker `w`.
    pub fn identity(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n == 0 || !n.is_multiple_of(k) {
            return Err(Error::UnevenBatches { n, k });
        }
        let batch = n / k;
        Shuffle::new((0..n).map(|p| p / batch).collect(), k)
    }

    /// A uniformly random labeled equal partition.
    ///
    /// Drawn by permuting the point ids and cutting into K blocks; every
    /// labeled partition corresponds to the same number of permutations, so
    /// the result is uniform over partitions.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || n == 0 || !n.is_multiple_of(k) {
            return Err(Error::UnevenBatches { n, k });
        }
        let batch = n / k;
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(rng);
        let mut assignment = vec![0usize; n];
        for (pos, &id) in ids.iter().enumerate() {
            assignment[id] = pos / batch;
        }
        Shuffle::new(assignment, k)
    }

    /// Number of labeled equal partitions, `n! / ((n/k)!)^k`, saturating at
    /// `u128::MAX` for absurd inputs.
    pub fn count(n: usize, k: usize) -> Result<u128> {
        if k == 0 || n == 0 || !n.is_multiple_of(k) {
            return Err(Error::UnevenBatches { n, k });
        }
        let batch = n / k;
        let mut total: u128 = 1;
        let mut remaining = n;
        for _ in 0..k {
            total = total.saturating_mul(binomial(remaining, batch));
            remaining -= batch;
        }
        Ok(total)
    }

    /// All distinct labeled equal partitions in lexicographic order on the
    /// assignment vector. Refuses (naming the count) when there are more than
    /// `cap`.
    pub fn enumerate(n: usize, k: usize, cap: u64) -> Result<Vec<Shuffle>> {
        let count = Shuffle::count(n, k)?;
        if count > cap as u128 {
            return Err(Error::EnumerationCapExceeded { n, k, count, cap });
        }
        let batch = n / k;
        let mut out = Vec::with_capacity(count as usize);
        let mut remaining = vec![batch; k];
        let mut current = Vec::with_capacity(n);
        fill(n, k, &mut remaining, &mut current, &mut out);
        debug_assert_eq!(out.len() as u128, count);
        Ok(out)
    }

    pub fn n_points(&self) -> usize {
        self.assignment.len()
    }

    pub fn k_workers(&self) -> usize {
        self.k_workers
    }

    /// Points per worker.
    pub fn batch_size(&self) -> usize {
        self.assignment.len() / self.k_workers
    }

    /// Worker index processing `point`.
    pub fn worker_of(&self, point: usize) -> usize {
        self.assignment[point]
    }

    /// Ascending point ids assigned to `worker`.
    pub fn batch(&self, worker: usize) -> Vec<usize> {
        assert!(worker < self.k_workers, "worker {worker} out of range");
        (0..self.assignment.len())
            .filter(|&p| self.assignment[p] == worker)
            .collect()
    }

    /// How many of `worker`'s points survive into `next`'s batch.
    pub fn batch_overlap(&self, next: &Shuffle, worker: usize) -> usize {
        (0..self.assignment.len())
            .filter(|&p| self.assignment[p] == worker && next.assignment[p] == worker)
            .count()
    }

    /// Parse the comma-separated assignment serialization, e.g. `"0,1,2"`.
    pub fn parse(text: &str, k_workers: usize) -> Result<Self> {
        let assignment = text
            .split(',')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| Error::BadAssignment {
                    reason: format!("'{part}' is not a worker index"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Shuffle::new(assignment, k_workers)
    }
}

impl fmt::Display for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shuffle({self})")
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // Exact at every step: prefix products of C(n, k) are integers.
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

fn fill(
    n: usize,
    k: usize,
    remaining: &mut [usize],
    current: &mut Vec<usize>,
    out: &mut Vec<Shuffle>,
) {
    if current.len() == n {
        out.push(Shuffle {
            assignment: current.clone(),
            k_workers: k,
        });
        return;
    }
    for w in 0..k {
        if remaining[w] > 0 {
            remaining[w] -= 1;
            current.push(w);
            fill(n, k, remaining, current, out);
            current.pop();
            remaining[w] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// Independent oracle: enumerate all n! permutations, cut each into K
    /// blocks, and deduplicate the induced labeled partitions.
    fn oracle_partitions(n: usize, k: usize) -> BTreeSet<Vec<usize>> {
        let batch = n / k;
        (0..n)
            .permutations(n)
            .map(|perm| {
                let mut assignment = vec![0usize; n];
                for (pos, &id) in perm.iter().enumerate() {
                    assignment[id] = pos / batch;
                }
                assignment
            })
            .collect()
    }

    #[test]
    fn enumeration_counts_match_oracle() {
        for (n, k, expect) in [(3, 3, 6), (4, 2, 6), (6, 3, 90), (4, 4, 24), (6, 2, 20)] {
            let listed = Shuffle::enumerate(n, k, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(listed.len(), expect, "count for ({n},{k})");
            let oracle = oracle_partitions(n, k);
            assert_eq!(oracle.len(), expect, "oracle count for ({n},{k})");
            let listed_set: BTreeSet<Vec<usize>> =
                listed.iter().map(|s| s.assignment.clone()).collect();
            assert_eq!(listed_set, oracle, "sets for ({n},{k})");
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let listed = Shuffle::enumerate(6, 3, DEFAULT_ENUMERATION_CAP).unwrap();
        for pair in listed.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn enumeration_cap_refusal_names_count() {
        let err = Shuffle::enumerate(6, 3, 10).unwrap_err();
        match err {
            Error::EnumerationCapExceeded { count, cap, .. } => {
                assert_eq!(count, 90);
                assert_eq!(cap, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn random_shuffle_is_a_valid_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let oracle = oracle_partitions(4, 2);
        for _ in 0..50 {
            let s = Shuffle::random(4, 2, &mut rng).unwrap();
            assert!(oracle.contains(&s.assignment));
        }
        let s3 = Shuffle::random(3, 3, &mut rng).unwrap();
        assert_eq!(s3.batch_size(), 1);
    }

    #[test]
    fn random_rejects_indivisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            Shuffle::random(5, 2, &mut rng),
            Err(Error::UnevenBatches { n: 5, k: 2 })
        ));
    }

    #[test]
    fn batches_read_back() {
        let s = Shuffle::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(s.batch(1), vec![1]);
        let s = Shuffle::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(s.batch(0), vec![0, 1]);
    }

    #[test]
    fn parse_round_trips_display() {
        let s = Shuffle::parse("0,1,2", 3).unwrap();
        assert_eq!(s.to_string(), "0,1,2");
        assert!(Shuffle::parse("0,1,2", 2).is_err());
        assert!(Shuffle::parse("0,x,2", 3).is_err());
    }

    #[test]
    fn overlap_counts() {
        let a = Shuffle::new(vec![0, 0, 1, 1], 2).unwrap();
        let b = Shuffle::new(vec![0, 1, 0, 1], 2).unwrap();
        assert_eq!(a.batch_overlap(&b, 0), 1);
        assert_eq!(a.batch_overlap(&a, 0), 2);
    }

    proptest! {
        #[test]
        fn batches_partition_all_ids(seed in any::<u64>(), k in 1usize..5, mult in 1usize..4) {
            let n = k * mult;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = Shuffle::random(n, k, &mut rng).unwrap();
            let mut seen = vec![false; n];
            for w in 0..k {
                let batch = s.batch(w);
                prop_assert_eq!(batch.len(), n / k);
                for p in batch {
                    prop_assert!(!seen[p], "point {} assigned twice", p);
                    seen[p] = true;
                }
            }
            prop_assert!(seen.into_iter().all(|x| x));
        }
    }
}
