//! The achievable shuffling schemes.
//!
//! Each scheme is a triple of master-side encoding, worker-side decoding, and
//! worker-side storage update for one (workers, storage) operating point:
//!
//! - [`Scheme::full_storage`]: every worker caches the whole dataset, no
//!   communication ever.
//! - [`Scheme::k2_min`]: two workers at minimum storage (N/2 points each);
//!   the master broadcasts the XOR of the departing halves of both batches,
//!   which shrinks with the batch overlap.
//! - [`Scheme::k3_min`]: three workers at minimum storage (N/3 points each);
//!   the master broadcasts two batch XORs, enough for every worker to
//!   reconstruct the whole dataset.
//! - [`Scheme::k3_two_thirds`]: three workers at 2N/3 points each. Every
//!   point lives in full at its processor while each other worker caches one
//!   of its two halves; a single XOR of per-worker "missing half" operands
//!   serves all three workers at once, and the update keeps the
//!   half-placement structure intact for the next round.
//! - [`Scheme::memory_share`]: splits the point dimensions into two slices
//!   and runs an inner scheme on each, reaching every storage level between
//!   two corner points with the matching rate combination.
//!
//! All operations take the shuffle pair as ambient side information; only
//! message payload bits count toward the rate.

mod full_storage;
mod k2_min;
mod k3_min;
mod k3_two_thirds;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use crate::bits::Bits;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rate::Message;
use crate::shuffle::Shuffle;
use crate::storage::{Fragment, HalfMap, WorkerState};

/// Which delivery/update strategy a [`Scheme`] runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    FullStorage,
    K2Min,
    K3Min,
    K3TwoThirds,
    MemoryShare {
        /// Scheme for the low dimension slice of width `alpha * d`.
        low: Box<Scheme>,
        /// Scheme for the remaining high slice.
        high: Box<Scheme>,
        alpha: Rational64,
    },
}

/// A fully specified scheme: strategy plus the (workers, points) geometry it
/// is valid for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    kind: SchemeKind,
    k_workers: usize,
    n_points: usize,
}

impl Scheme {
    /// Storage for the whole dataset at every worker (S = N).
    pub fn full_storage(k_workers: usize, n_points: usize) -> Result<Self> {
        check_geometry(k_workers, n_points)?;
        Ok(Scheme {
            kind: SchemeKind::FullStorage,
            k_workers,
            n_points,
        })
    }

    /// Two workers at minimum storage (S = N/2).
    pub fn k2_min(n_points: usize) -> Result<Self> {
        check_geometry(2, n_points)?;
        Ok(Scheme {
            kind: SchemeKind::K2Min,
            k_workers: 2,
            n_points,
        })
    }

    /// Three workers at minimum storage (S = N/3).
    pub fn k3_min(n_points: usize) -> Result<Self> {
        check_geometry(3, n_points)?;
        Ok(Scheme {
            kind: SchemeKind::K3Min,
            k_workers: 3,
            n_points,
        })
    }

    /// Three workers at S = 2N/3: full batch plus half of every other point.
    pub fn k3_two_thirds(n_points: usize) -> Result<Self> {
        check_geometry(3, n_points)?;
        Ok(Scheme {
            kind: SchemeKind::K3TwoThirds,
            k_workers: 3,
            n_points,
        })
    }

    /// Run `low` on the first `alpha * d` dimensions and `high` on the rest.
    ///
    /// Storage composes as `alpha * S_low + (1 - alpha) * S_high` points and
    /// the worst-case rate combines the same way.
    pub fn memory_share(low: Scheme, high: Scheme, alpha: Rational64) -> Result<Self> {
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        if alpha < zero || alpha > one {
            return Err(Error::BadShareFraction { alpha });
        }
        if low.k_workers != high.k_workers || low.n_points != high.n_points {
            return Err(Error::SchemeMismatch {
                expected: "inner schemes with identical (workers, points) geometry".into(),
                actual: format!(
                    "({}, {}) vs ({}, {})",
                    low.k_workers, low.n_points, high.k_workers, high.n_points
                ),
            });
        }
        let (k_workers, n_points) = (low.k_workers, low.n_points);
        Ok(Scheme {
            kind: SchemeKind::MemoryShare {
                low: Box::new(low),
                high: Box::new(high),
                alpha,
            },
            k_workers,
            n_points,
        })
    }

    /// Pick the scheme achieving storage level `storage` (in points): the
    /// dedicated scheme at a corner point, memory sharing between the two
    /// adjacent corners otherwise.
    pub fn for_storage(k_workers: usize, n_points: usize, storage: Rational64) -> Result<Self> {
        check_geometry(k_workers, n_points)?;
        let n = Rational64::from_integer(n_points as i64);
        let min = n / Rational64::from_integer(k_workers as i64);
        if storage < min || storage > n {
            return Err(Error::StorageOutOfRange {
                k: k_workers,
                n: n_points,
                storage,
                min,
                max: n,
            });
        }
        match k_workers {
            2 => {
                let half = min;
                if storage == half {
                    Scheme::k2_min(n_points)
                } else if storage == n {
                    Scheme::full_storage(2, n_points)
                } else {
                    // storage = alpha * N/2 + (1 - alpha) * N
                    let alpha = (n - storage) / (n - half);
                    Scheme::memory_share(
                        Scheme::k2_min(n_points)?,
                        Scheme::full_storage(2, n_points)?,
                        alpha,
                    )
                }
            }
            3 => {
                let third = min;
                let two_thirds = third * Rational64::from_integer(2);
                if storage == third {
                    Scheme::k3_min(n_points)
                } else if storage == two_thirds {
                    Scheme::k3_two_thirds(n_points)
                } else if storage == n {
                    Scheme::full_storage(3, n_points)
                } else if storage < two_thirds {
                    let alpha = (two_thirds - storage) / (two_thirds - third);
                    Scheme::memory_share(
                        Scheme::k3_min(n_points)?,
                        Scheme::k3_two_thirds(n_points)?,
                        alpha,
                    )
                } else {
                    let alpha = (n - storage) / (n - two_thirds);
                    Scheme::memory_share(
                        Scheme::k3_two_thirds(n_points)?,
                        Scheme::full_storage(3, n_points)?,
                        alpha,
                    )
                }
            }
            k => Err(Error::UnsupportedWorkerCount { k }),
        }
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn k_workers(&self) -> usize {
        self.k_workers
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Storage level S in points (multiples of d bits per worker).
    pub fn storage_points(&self) -> Rational64 {
        let n = Rational64::from_integer(self.n_points as i64);
        match &self.kind {
            SchemeKind::FullStorage => n,
            SchemeKind::K2Min => n / Rational64::from_integer(2),
            SchemeKind::K3Min => n / Rational64::from_integer(3),
            SchemeKind::K3TwoThirds => {
                n * Rational64::new(2, 3)
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                *alpha * low.storage_points()
                    + (Rational64::from_integer(1) - alpha) * high.storage_points()
            }
        }
    }

    /// Per-worker storage budget `S * d` in bits.
    pub fn budget_bits(&self, dim_bits: usize) -> Result<u64> {
        self.budget_bits_range(0, dim_bits)
    }

    /// Check that every dimension slice this scheme induces is realizable:
    /// memory-sharing split points must land on whole bits and half-splitting
    /// slices must have even width.
    pub fn validate_dims(&self, dim_bits: usize) -> Result<()> {
        self.validate_range(0, dim_bits)
    }

    /// Short human-readable identifier.
    pub fn name(&self) -> String {
        match &self.kind {
            SchemeKind::FullStorage => "full-storage".into(),
            SchemeKind::K2Min => "k2-min".into(),
            SchemeKind::K3Min => "k3-min".into(),
            SchemeKind::K3TwoThirds => "k3-two-thirds".into(),
            SchemeKind::MemoryShare { low, high, alpha } => {
                format!("memory-share(alpha={}, {} + {})", alpha, low.name(), high.name())
            }
        }
    }

    // -----------------------------------------------------------------------
    // Protocol operations
    // -----------------------------------------------------------------------

    /// Master-side initial placement for shuffle `s0`.
    ///
    /// Every worker stores its full batch; excess storage is filled according
    /// to the scheme. Returns the worker states and, when any slice runs the
    /// half-splitting placement, the half assignment.
    pub fn init_placement(
        &self,
        data: &Dataset,
        s0: &Shuffle,
    ) -> Result<(Vec<WorkerState>, Option<HalfMap>)> {
        if data.n_points() != self.n_points {
            return Err(Error::SchemeMismatch {
                expected: format!("a dataset of {} points", self.n_points),
                actual: format!("{} points", data.n_points()),
            });
        }
        self.check_shuffle(s0)?;
        let dim_bits = data.dim_bits();
        self.validate_dims(dim_bits)?;
        let budget = self.budget_bits(dim_bits)?;

        let mut states: Vec<WorkerState> = (0..self.k_workers)
            .map(|w| {
                let mut st = WorkerState::new(w, dim_bits, budget);
                st.set_processing(
                    s0.batch(w)
                        .into_iter()
                        .map(|x| (x, data.point(x).clone()))
                        .collect(),
                );
                st
            })
            .collect();

        let mut fragments: Vec<Vec<Fragment>> = vec![Vec::new(); self.k_workers];
        let mut slices = Vec::new();
        self.place_excess_range(data, s0, 0, dim_bits, &mut fragments, &mut slices)?;
        for (state, frags) in states.iter_mut().zip(fragments) {
            state.set_excess(frags)?;
        }
        Ok((states, HalfMap::from_slices(slices)))
    }

    /// Master-side delivery encoding for the transition `s_t -> s_t1`.
    pub fn deliver(
        &self,
        states: &[WorkerState],
        half_map: Option<&HalfMap>,
        s_t: &Shuffle,
        s_t1: &Shuffle,
    ) -> Result<Message> {
        self.check_shuffle(s_t)?;
        self.check_shuffle(s_t1)?;
        if states.len() != self.k_workers {
            return Err(Error::ProtocolState(format!(
                "expected {} worker states, got {}",
                self.k_workers,
                states.len()
            )));
        }
        for (i, state) in states.iter().enumerate() {
            if state.worker_id() != i {
                return Err(Error::ProtocolState(format!(
                    "state at position {i} belongs to worker {}",
                    state.worker_id()
                )));
            }
            let held: Vec<usize> = state.processing().keys().copied().collect();
            if held != s_t.batch(i) {
                return Err(Error::ProtocolState(format!(
                    "worker {i} is processing {held:?} but the current shuffle assigns {:?}",
                    s_t.batch(i)
                )));
            }
        }
        let dim_bits = states[0].dim_bits();
        self.validate_dims(dim_bits)?;
        let payload = self.deliver_range(states, half_map, s_t, s_t1, 0, dim_bits)?;
        debug_assert_eq!(
            payload.len() as u64,
            self.expected_len_range(s_t, s_t1, 0, dim_bits)?
        );
        Ok(Message::new(payload, s_t.clone(), s_t1.clone()))
    }

    /// Worker-side decoding: recover the full payloads of this worker's new
    /// batch from its own storage plus the broadcast message, nothing else.
    pub fn decode(
        &self,
        state: &WorkerState,
        half_map: Option<&HalfMap>,
        msg: &Message,
        s_t: &Shuffle,
        s_t1: &Shuffle,
    ) -> Result<BTreeMap<usize, Bits>> {
        self.check_shuffle(s_t)?;
        self.check_shuffle(s_t1)?;
        if state.worker_id() >= self.k_workers {
            return Err(Error::ProtocolState(format!(
                "worker {} does not exist in a {}-worker scheme",
                state.worker_id(),
                self.k_workers
            )));
        }
        let (from, to) = msg.transition();
        if from != s_t || to != s_t1 {
            return Err(Error::ProtocolState(
                "message was encoded for a different shuffle transition".into(),
            ));
        }
        let dim_bits = state.dim_bits();
        self.validate_dims(dim_bits)?;
        let expected = self.expected_len_range(s_t, s_t1, 0, dim_bits)?;
        if msg.length_bits() != expected {
            return Err(Error::ProtocolState(format!(
                "message has {} bits, transition calls for {expected}",
                msg.length_bits()
            )));
        }
        let mut out = BTreeMap::new();
        self.decode_range(state, half_map, msg.payload(), s_t, s_t1, 0, dim_bits, &mut out)?;
        debug_assert!(out.keys().copied().eq(s_t1.batch(state.worker_id())));
        debug_assert!(out.values().all(|b| b.len() == dim_bits));
        Ok(out)
    }

    /// Worker-side storage update.
    ///
    /// The new state is a function of the old state, the message, and the
    /// ambient shuffle descriptors only; that restriction is what the
    /// signature enforces. Also returns the advanced half assignment, which
    /// every worker derives identically.
    pub fn update(
        &self,
        state: &WorkerState,
        half_map: Option<&HalfMap>,
        msg: &Message,
        s_t: &Shuffle,
        s_t1: &Shuffle,
    ) -> Result<(WorkerState, Option<HalfMap>)> {
        let decoded = self.decode(state, half_map, msg, s_t, s_t1)?;
        let dim_bits = state.dim_bits();
        let mut new_excess = Vec::new();
        self.update_excess_range(state, half_map, s_t, s_t1, 0, dim_bits, &mut new_excess)?;

        let mut next = WorkerState::new(state.worker_id(), dim_bits, state.budget_bits());
        next.set_processing(decoded);
        next.set_excess(new_excess)?;
        if next.stored_bits() > next.budget_bits() {
            return Err(Error::invariant(
                "budget",
                format!(
                    "worker {} would store {} bits, budget is {}",
                    state.worker_id(),
                    next.stored_bits(),
                    next.budget_bits()
                ),
            ));
        }
        let next_map = match half_map {
            Some(hm) => Some(hm.advance(s_t, s_t1)?),
            None => None,
        };
        Ok((next, next_map))
    }

    /// Exact broadcast length in bits for a transition, without building the
    /// message. Delivery always produces exactly this many bits.
    pub fn message_len_bits(&self, s_t: &Shuffle, s_t1: &Shuffle, dim_bits: usize) -> Result<u64> {
        self.check_shuffle(s_t)?;
        self.check_shuffle(s_t1)?;
        self.validate_dims(dim_bits)?;
        self.expected_len_range(s_t, s_t1, 0, dim_bits)
    }

    // -----------------------------------------------------------------------
    // Range recursion
    // -----------------------------------------------------------------------

    fn check_shuffle(&self, s: &Shuffle) -> Result<()> {
        if s.n_points() != self.n_points || s.k_workers() != self.k_workers {
            return Err(Error::ProtocolState(format!(
                "shuffle is over ({}, {}) but the scheme needs ({}, {})",
                s.n_points(),
                s.k_workers(),
                self.n_points,
                self.k_workers
            )));
        }
        Ok(())
    }

    fn validate_range(&self, lo: usize, hi: usize) -> Result<()> {
        match &self.kind {
            SchemeKind::FullStorage | SchemeKind::K2Min | SchemeKind::K3Min => Ok(()),
            SchemeKind::K3TwoThirds => {
                if !(hi - lo).is_multiple_of(2) {
                    Err(Error::SliceDivisibility {
                        width: hi - lo,
                        reason: "half-splitting needs an even number of bits".into(),
                    })
                } else {
                    Ok(())
                }
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                low.validate_range(lo, mid)?;
                high.validate_range(mid, hi)
            }
        }
    }

    fn budget_bits_range(&self, lo: usize, hi: usize) -> Result<u64> {
        let width = (hi - lo) as u64;
        let n = self.n_points as u64;
        match &self.kind {
            SchemeKind::FullStorage => Ok(n * width),
            SchemeKind::K2Min => Ok(n / 2 * width),
            SchemeKind::K3Min => Ok(n / 3 * width),
            SchemeKind::K3TwoThirds => Ok(2 * n / 3 * width),
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                Ok(low.budget_bits_range(lo, mid)? + high.budget_bits_range(mid, hi)?)
            }
        }
    }

    fn expected_len_range(&self, s_t: &Shuffle, s_t1: &Shuffle, lo: usize, hi: usize) -> Result<u64> {
        match &self.kind {
            SchemeKind::FullStorage => Ok(0),
            SchemeKind::K2Min => Ok(k2_min::expected_len_bits(s_t, s_t1, lo, hi)),
            SchemeKind::K3Min => Ok(k3_min::expected_len_bits(s_t, lo, hi)),
            SchemeKind::K3TwoThirds => Ok(k3_two_thirds::expected_len_bits(s_t, s_t1, lo, hi)),
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                Ok(low.expected_len_range(s_t, s_t1, lo, mid)?
                    + high.expected_len_range(s_t, s_t1, mid, hi)?)
            }
        }
    }

    fn place_excess_range(
        &self,
        data: &Dataset,
        s0: &Shuffle,
        lo: usize,
        hi: usize,
        fragments: &mut [Vec<Fragment>],
        slices: &mut Vec<crate::storage::SliceHalves>,
    ) -> Result<()> {
        match &self.kind {
            SchemeKind::K2Min | SchemeKind::K3Min => Ok(()),
            SchemeKind::FullStorage => full_storage::place_excess_range(data, s0, lo, hi, fragments),
            SchemeKind::K3TwoThirds => {
                k3_two_thirds::place_excess_range(data, s0, lo, hi, fragments, slices)
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                low.place_excess_range(data, s0, lo, mid, fragments, slices)?;
                high.place_excess_range(data, s0, mid, hi, fragments, slices)
            }
        }
    }

    fn deliver_range(
        &self,
        states: &[WorkerState],
        half_map: Option<&HalfMap>,
        s_t: &Shuffle,
        s_t1: &Shuffle,
        lo: usize,
        hi: usize,
    ) -> Result<Bits> {
        match &self.kind {
            SchemeKind::FullStorage => Ok(Bits::default()),
            SchemeKind::K2Min => k2_min::deliver_range(states, s_t, s_t1, lo, hi),
            SchemeKind::K3Min => k3_min::deliver_range(states, s_t, lo, hi),
            SchemeKind::K3TwoThirds => {
                let slice = slice_for(half_map, lo, hi)?;
                k3_two_thirds::deliver_range(states, slice, s_t, s_t1)
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                let first = low.deliver_range(states, half_map, s_t, s_t1, lo, mid)?;
                let second = high.deliver_range(states, half_map, s_t, s_t1, mid, hi)?;
                Ok(Bits::concat([&first, &second]))
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_range(
        &self,
        state: &WorkerState,
        half_map: Option<&HalfMap>,
        payload: &Bits,
        s_t: &Shuffle,
        s_t1: &Shuffle,
        lo: usize,
        hi: usize,
        out: &mut BTreeMap<usize, Bits>,
    ) -> Result<()> {
        match &self.kind {
            SchemeKind::FullStorage => full_storage::decode_range(state, s_t1, lo, hi, out),
            SchemeKind::K2Min => k2_min::decode_range(state, payload, s_t, s_t1, lo, hi, out),
            SchemeKind::K3Min => k3_min::decode_range(state, payload, s_t, s_t1, lo, hi, out),
            SchemeKind::K3TwoThirds => {
                let slice = slice_for(half_map, lo, hi)?;
                k3_two_thirds::decode_range(state, slice, payload, s_t, s_t1, lo, hi, out)
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                let split = low.expected_len_range(s_t, s_t1, lo, mid)? as usize;
                let first = payload.slice(0, split);
                let second = payload.slice(split, payload.len());
                low.decode_range(state, half_map, &first, s_t, s_t1, lo, mid, out)?;
                high.decode_range(state, half_map, &second, s_t, s_t1, mid, hi, out)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn update_excess_range(
        &self,
        state: &WorkerState,
        half_map: Option<&HalfMap>,
        s_t: &Shuffle,
        s_t1: &Shuffle,
        lo: usize,
        hi: usize,
        new_excess: &mut Vec<Fragment>,
    ) -> Result<()> {
        match &self.kind {
            SchemeKind::K2Min | SchemeKind::K3Min => Ok(()),
            SchemeKind::FullStorage => {
                full_storage::update_excess_range(state, s_t1, lo, hi, new_excess)
            }
            SchemeKind::K3TwoThirds => {
                let slice = slice_for(half_map, lo, hi)?;
                k3_two_thirds::update_excess_range(state, slice, s_t, s_t1, lo, hi, new_excess)
            }
            SchemeKind::MemoryShare { low, high, alpha } => {
                let mid = share_mid(*alpha, lo, hi)?;
                low.update_excess_range(state, half_map, s_t, s_t1, lo, mid, new_excess)?;
                high.update_excess_range(state, half_map, s_t, s_t1, mid, hi, new_excess)
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (k={}, n={}, s={})",
            self.name(),
            self.k_workers,
            self.n_points,
            self.storage_points()
        )
    }
}

fn check_geometry(k_workers: usize, n_points: usize) -> Result<()> {
    if k_workers == 0 || n_points == 0 || !n_points.is_multiple_of(k_workers) {
        return Err(Error::UnevenBatches {
            n: n_points,
            k: k_workers,
        });
    }
    Ok(())
}

/// Bit offset where a memory-sharing scheme splits the slice `[lo, hi)`.
fn share_mid(alpha: Rational64, lo: usize, hi: usize) -> Result<usize> {
    let width = hi - lo;
    let exact = alpha * Rational64::from_integer(width as i64);
    if !exact.is_integer() {
        return Err(Error::SliceDivisibility {
            width,
            reason: format!("fraction {alpha} of the slice is not a whole number of bits"),
        });
    }
    Ok(lo + exact.to_integer() as usize)
}

fn slice_for(
    half_map: Option<&HalfMap>,
    lo: usize,
    hi: usize,
) -> Result<&crate::storage::SliceHalves> {
    half_map
        .and_then(|hm| hm.slice_at(lo, hi))
        .ok_or_else(|| {
            Error::ProtocolState(format!("no half assignment covers dimensions {lo}..{hi}"))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn storage_points_per_scheme() {
        assert_eq!(
            Scheme::full_storage(3, 6).unwrap().storage_points(),
            rational(6, 1)
        );
        assert_eq!(Scheme::k2_min(4).unwrap().storage_points(), rational(2, 1));
        assert_eq!(Scheme::k3_min(6).unwrap().storage_points(), rational(2, 1));
        assert_eq!(
            Scheme::k3_two_thirds(6).unwrap().storage_points(),
            rational(4, 1)
        );
        let share = Scheme::memory_share(
            Scheme::k3_min(6).unwrap(),
            Scheme::k3_two_thirds(6).unwrap(),
            rational(1, 2),
        )
        .unwrap();
        assert_eq!(share.storage_points(), rational(3, 1));
    }

    #[test]
    fn for_storage_picks_corners_and_interpolates() {
        let s = Scheme::for_storage(3, 6, rational(2, 1)).unwrap();
        assert_eq!(s.kind(), &SchemeKind::K3Min);
        let s = Scheme::for_storage(3, 6, rational(4, 1)).unwrap();
        assert_eq!(s.kind(), &SchemeKind::K3TwoThirds);
        let s = Scheme::for_storage(3, 6, rational(6, 1)).unwrap();
        assert_eq!(s.kind(), &SchemeKind::FullStorage);
        let s = Scheme::for_storage(2, 4, rational(2, 1)).unwrap();
        assert_eq!(s.kind(), &SchemeKind::K2Min);

        let s = Scheme::for_storage(3, 6, rational(3, 1)).unwrap();
        assert_eq!(s.storage_points(), rational(3, 1));
        match s.kind() {
            SchemeKind::MemoryShare { low, high, alpha } => {
                assert_eq!(low.kind(), &SchemeKind::K3Min);
                assert_eq!(high.kind(), &SchemeKind::K3TwoThirds);
                assert_eq!(*alpha, rational(1, 2));
            }
            other => panic!("expected memory share, got {other:?}"),
        }

        let s = Scheme::for_storage(3, 6, rational(5, 1)).unwrap();
        assert_eq!(s.storage_points(), rational(5, 1));
        match s.kind() {
            SchemeKind::MemoryShare { low, high, .. } => {
                assert_eq!(low.kind(), &SchemeKind::K3TwoThirds);
                assert_eq!(high.kind(), &SchemeKind::FullStorage);
            }
            other => panic!("expected memory share, got {other:?}"),
        }
    }

    #[test]
    fn for_storage_rejects_out_of_range() {
        assert!(matches!(
            Scheme::for_storage(3, 6, rational(1, 1)),
            Err(Error::StorageOutOfRange { .. })
        ));
        assert!(matches!(
            Scheme::for_storage(3, 6, rational(7, 1)),
            Err(Error::StorageOutOfRange { .. })
        ));
        assert!(matches!(
            Scheme::for_storage(4, 8, rational(4, 1)),
            Err(Error::UnsupportedWorkerCount { k: 4 })
        ));
    }

    #[test]
    fn divisibility_is_validated() {
        // alpha * d must be integral.
        let share = Scheme::memory_share(
            Scheme::k3_min(3).unwrap(),
            Scheme::full_storage(3, 3).unwrap(),
            rational(1, 3),
        )
        .unwrap();
        assert!(share.validate_dims(4).is_err());
        assert!(share.validate_dims(6).is_ok());

        // A half-splitting slice of odd width is rejected.
        let share = Scheme::memory_share(
            Scheme::k3_min(3).unwrap(),
            Scheme::k3_two_thirds(3).unwrap(),
            rational(1, 2),
        )
        .unwrap();
        assert!(matches!(
            share.validate_dims(2),
            Err(Error::SliceDivisibility { width: 1, .. })
        ));
        assert!(share.validate_dims(4).is_ok());
    }

    #[test]
    fn alpha_outside_unit_interval_is_rejected() {
        let err = Scheme::memory_share(
            Scheme::k3_min(3).unwrap(),
            Scheme::full_storage(3, 3).unwrap(),
            rational(3, 2),
        );
        assert!(matches!(err, Err(Error::BadShareFraction { .. })));
    }

    #[test]
    fn budgets_in_bits() {
        assert_eq!(Scheme::k2_min(4).unwrap().budget_bits(8).unwrap(), 16);
        assert_eq!(Scheme::k3_two_thirds(3).unwrap().budget_bits(2).unwrap(), 4);
        let share = Scheme::for_storage(3, 6, rational(3, 1)).unwrap();
        assert_eq!(share.budget_bits(12).unwrap(), 36);
    }

    #[test]
    fn deliver_rejects_states_inconsistent_with_the_shuffle() {
        let data = crate::data::Dataset::random(3, 2, 30).unwrap();
        let scheme = Scheme::k3_min(3).unwrap();
        let s0 = crate::shuffle::Shuffle::identity(3, 3).unwrap();
        let other = crate::shuffle::Shuffle::parse("1,2,0", 3).unwrap();
        let (states, _) = scheme.init_placement(&data, &s0).unwrap();
        // Claiming the placement belongs to a different shuffle must fail.
        let err = scheme.deliver(&states, None, &other, &s0).unwrap_err();
        assert!(matches!(err, Error::ProtocolState(_)));
    }

    #[test]
    fn decode_rejects_a_message_for_another_transition() {
        let data = crate::data::Dataset::random(3, 2, 31).unwrap();
        let scheme = Scheme::k3_min(3).unwrap();
        let s0 = crate::shuffle::Shuffle::identity(3, 3).unwrap();
        let s1 = crate::shuffle::Shuffle::parse("1,2,0", 3).unwrap();
        let s2 = crate::shuffle::Shuffle::parse("2,0,1", 3).unwrap();
        let (states, _) = scheme.init_placement(&data, &s0).unwrap();
        let msg = scheme.deliver(&states, None, &s0, &s1).unwrap();
        let err = scheme.decode(&states[0], None, &msg, &s0, &s2).unwrap_err();
        assert!(matches!(err, Error::ProtocolState(_)));
    }

    #[test]
    fn update_sees_only_the_local_state() {
        // The update signature admits (own state, half map, message,
        // shuffles) and nothing else; corrupting every other worker's state
        // cannot change what one worker computes.
        let data = crate::data::Dataset::random(3, 2, 14).unwrap();
        let scheme = Scheme::k3_two_thirds(3).unwrap();
        let s0 = crate::shuffle::Shuffle::identity(3, 3).unwrap();
        let s1 = crate::shuffle::Shuffle::parse("1,2,0", 3).unwrap();
        let (mut states, half_map) = scheme.init_placement(&data, &s0).unwrap();
        let half_map = half_map.unwrap();
        let msg = scheme.deliver(&states, Some(&half_map), &s0, &s1).unwrap();

        let before = scheme
            .update(&states[0], Some(&half_map), &msg, &s0, &s1)
            .unwrap();
        states[1].set_excess(Vec::new()).unwrap();
        states[2].set_excess(Vec::new()).unwrap();
        let after = scheme
            .update(&states[0], Some(&half_map), &msg, &s0, &s1)
            .unwrap();
        assert_eq!(before, after);
    }
}
