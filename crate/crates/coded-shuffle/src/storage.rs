//! Worker-side storage: processing batches, excess fragments, and the
//! half-assignment bookkeeping used by the three-worker excess-storage scheme.

use std::collections::BTreeMap;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::shuffle::Shuffle;

// ---------------------------------------------------------------------------
// Fragment
// ---------------------------------------------------------------------------

/// A contiguous dimension range of one point cached in a worker's excess
/// storage, together with its payload bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub point_id: usize,
    pub dim_lo: usize,
    pub dim_hi: usize,
    bits: Bits,
}

impl Fragment {
    pub fn new(point_id: usize, dim_lo: usize, dim_hi: usize, bits: Bits) -> Result<Self> {
        if dim_lo >= dim_hi || bits.len() != dim_hi - dim_lo {
            return Err(Error::ProtocolState(format!(
                "fragment for point {point_id} has range {dim_lo}..{dim_hi} but {} payload bits",
                bits.len()
            )));
        }
        Ok(Fragment {
            point_id,
            dim_lo,
            dim_hi,
            bits,
        })
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len_bits(&self) -> usize {
        self.dim_hi - self.dim_lo
    }

    fn overlaps(&self, other: &Fragment) -> bool {
        self.point_id == other.point_id && self.dim_lo < other.dim_hi && other.dim_lo < self.dim_hi
    }
}

// ---------------------------------------------------------------------------
// WorkerState
// ---------------------------------------------------------------------------

/// One worker's storage: the batch under processing (full points) plus excess
/// fragments of foreign points, within a fixed bit budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkerState {
    worker_id: usize,
    dim_bits: usize,
    budget_bits: u64,
    processing: BTreeMap<usize, Bits>,
    excess: Vec<Fragment>,
}

impl WorkerState {
    pub(crate) fn new(worker_id: usize, dim_bits: usize, budget_bits: u64) -> Self {
        WorkerState {
            worker_id,
            dim_bits,
            budget_bits,
            processing: BTreeMap::new(),
            excess: Vec::new(),
        }
    }

    pub(crate) fn set_processing(&mut self, processing: BTreeMap<usize, Bits>) {
        self.processing = processing;
    }

    /// Install fragments, keeping them sorted by (point, range) and rejecting
    /// out-of-range dimensions and overlaps.
    pub(crate) fn set_excess(&mut self, mut fragments: Vec<Fragment>) -> Result<()> {
        if let Some(bad) = fragments.iter().find(|f| f.dim_hi > self.dim_bits) {
            return Err(Error::ProtocolState(format!(
                "fragment range {}..{} exceeds the {}-bit point dimension",
                bad.dim_lo, bad.dim_hi, self.dim_bits
            )));
        }
        fragments.sort_by_key(|f| (f.point_id, f.dim_lo));
        for pair in fragments.windows(2) {
            if pair[0].overlaps(&pair[1]) {
                return Err(Error::invariant(
                    "fragment-overlap",
                    format!(
                        "worker {} stores overlapping fragments of point {}",
                        self.worker_id, pair[0].point_id
                    ),
                ));
            }
        }
        self.excess = fragments;
        Ok(())
    }

    pub fn worker_id(&self) -> usize {
        self.worker_id
    }

    pub fn dim_bits(&self) -> usize {
        self.dim_bits
    }

    /// The storage budget `S * d` in bits.
    pub fn budget_bits(&self) -> u64 {
        self.budget_bits
    }

    /// Full payloads of the batch under processing, keyed by point id.
    pub fn processing(&self) -> &BTreeMap<usize, Bits> {
        &self.processing
    }

    /// Excess fragments, sorted by (point, range).
    pub fn excess(&self) -> &[Fragment] {
        &self.excess
    }

    /// Bits actually stored right now.
    pub fn stored_bits(&self) -> u64 {
        let processing: u64 = self.processing.values().map(|b| b.len() as u64).sum();
        let excess: u64 = self.excess.iter().map(|f| f.len_bits() as u64).sum();
        processing + excess
    }

    /// The excess fragment with exactly this range, if stored.
    pub fn fragment(&self, point_id: usize, dim_lo: usize, dim_hi: usize) -> Option<&Fragment> {
        self.excess
            .iter()
            .find(|f| f.point_id == point_id && f.dim_lo == dim_lo && f.dim_hi == dim_hi)
    }

    /// Bits of `[dim_lo, dim_hi)` for a point, from the processing copy or
    /// from any single covering fragment.
    pub fn range_bits(&self, point_id: usize, dim_lo: usize, dim_hi: usize) -> Option<Bits> {
        if let Some(full) = self.processing.get(&point_id) {
            return Some(full.slice(dim_lo, dim_hi));
        }
        self.excess
            .iter()
            .find(|f| f.point_id == point_id && f.dim_lo <= dim_lo && dim_hi <= f.dim_hi)
            .map(|f| f.bits.slice(dim_lo - f.dim_lo, dim_hi - f.dim_lo))
    }
}

// ---------------------------------------------------------------------------
// Half assignment (K = 3 excess-storage scheme)
// ---------------------------------------------------------------------------

/// Which worker holds which half of one point within a dimension slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfHold {
    pub holder: usize,
    pub dim_lo: usize,
    pub dim_hi: usize,
}

/// Per-point half assignment: the processor plus the two non-processing
/// workers' disjoint half ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointHalves {
    pub processor: usize,
    /// Sorted by `dim_lo`; the two ranges are disjoint and cover the slice.
    pub holds: [HalfHold; 2],
}

impl PointHalves {
    /// Range held by `worker`, if it is one of the two non-processors.
    pub fn held_range(&self, worker: usize) -> Option<(usize, usize)> {
        self.holds
            .iter()
            .find(|h| h.holder == worker)
            .map(|h| (h.dim_lo, h.dim_hi))
    }
}

/// The half assignment for every point across one dimension slice.
///
/// This is global, deterministic side information: it starts from a fixed
/// placement rule and evolves as a pure function of the shuffle pair, so
/// master and workers always agree on it without extra communication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceHalves {
    dim_lo: usize,
    dim_hi: usize,
    points: Vec<PointHalves>,
}

impl SliceHalves {
    /// Initial placement rule: for a point processed by `q`, the two
    /// non-processors in ascending index order receive the low and high half
    /// of the slice respectively.
    pub fn initial(s0: &Shuffle, dim_lo: usize, dim_hi: usize) -> Result<Self> {
        let width = dim_hi - dim_lo;
        if !width.is_multiple_of(2) {
            return Err(Error::SliceDivisibility {
                width,
                reason: "half-splitting needs an even slice width".into(),
            });
        }
        if s0.k_workers() != 3 {
            return Err(Error::SchemeMismatch {
                expected: "3 workers for half-splitting".into(),
                actual: format!("{} workers", s0.k_workers()),
            });
        }
        let mid = dim_lo + width / 2;
        let points = (0..s0.n_points())
            .map(|point| {
                let q = s0.worker_of(point);
                let others: Vec<usize> = (0..3).filter(|&w| w != q).collect();
                PointHalves {
                    processor: q,
                    holds: [
                        HalfHold {
                            holder: others[0],
                            dim_lo,
                            dim_hi: mid,
                        },
                        HalfHold {
                            holder: others[1],
                            dim_lo: mid,
                            dim_hi,
                        },
                    ],
                }
            })
            .collect();
        Ok(SliceHalves {
            dim_lo,
            dim_hi,
            points,
        })
    }

    pub fn dim_lo(&self) -> usize {
        self.dim_lo
    }

    pub fn dim_hi(&self) -> usize {
        self.dim_hi
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, point_id: usize) -> &PointHalves {
        &self.points[point_id]
    }

    pub fn processor(&self, point_id: usize) -> usize {
        self.points[point_id].processor
    }

    /// Range of this slice held by `worker` for `point_id`, if any.
    pub fn held_range(&self, point_id: usize, worker: usize) -> Option<(usize, usize)> {
        self.points[point_id].held_range(worker)
    }

    /// Advance the assignment across one shuffle transition.
    ///
    /// A point that keeps its processor keeps its halves. A point moving from
    /// processor `q` to `p` is absorbed fully by `p`; the third worker keeps
    /// its half unchanged, and `q` takes over the range formerly labeled as
    /// `p`'s half. The two ranges per point therefore never change, only the
    /// holder labels do.
    pub fn advance(&self, s_t: &Shuffle, s_t1: &Shuffle) -> Result<SliceHalves> {
        let mut points = Vec::with_capacity(self.points.len());
        for (point_id, halves) in self.points.iter().enumerate() {
            let q = halves.processor;
            if s_t.worker_of(point_id) != q {
                return Err(Error::ProtocolState(format!(
                    "half assignment says worker {q} processes point {point_id}, shuffle says {}",
                    s_t.worker_of(point_id)
                )));
            }
            let p = s_t1.worker_of(point_id);
            if p == q {
                points.push(halves.clone());
                continue;
            }
            let r = 3 - p - q;
            let (p_lo, p_hi) = halves.held_range(p).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "no half of point {point_id} is assigned to worker {p}"
                ))
            })?;
            let (r_lo, r_hi) = halves.held_range(r).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "no half of point {point_id} is assigned to worker {r}"
                ))
            })?;
            let mut holds = [
                HalfHold {
                    holder: q,
                    dim_lo: p_lo,
                    dim_hi: p_hi,
                },
                HalfHold {
                    holder: r,
                    dim_lo: r_lo,
                    dim_hi: r_hi,
                },
            ];
            holds.sort_by_key(|h| h.dim_lo);
            points.push(PointHalves {
                processor: p,
                holds,
            });
        }
        Ok(SliceHalves {
            dim_lo: self.dim_lo,
            dim_hi: self.dim_hi,
            points,
        })
    }

    /// Structural check: for every point the two holds are the point's
    /// non-processors, their ranges are disjoint halves covering the slice.
    pub fn is_well_formed(&self, shuffle: &Shuffle) -> bool {
        let mid_width = (self.dim_hi - self.dim_lo) / 2;
        self.points.iter().enumerate().all(|(point_id, halves)| {
            let q = halves.processor;
            let [a, b] = &halves.holds;
            q == shuffle.worker_of(point_id)
                && a.holder != b.holder
                && a.holder != q
                && b.holder != q
                && a.dim_lo == self.dim_lo
                && a.dim_hi == a.dim_lo + mid_width
                && b.dim_lo == a.dim_hi
                && b.dim_hi == self.dim_hi
        })
    }
}

/// The full half assignment of a scheme: one [`SliceHalves`] per dimension
/// slice that runs the three-worker excess-storage placement. Corner schemes
/// have a single slice covering all dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfMap {
    slices: Vec<SliceHalves>,
}

impl HalfMap {
    pub(crate) fn from_slices(mut slices: Vec<SliceHalves>) -> Option<Self> {
        if slices.is_empty() {
            return None;
        }
        slices.sort_by_key(|s| s.dim_lo);
        Some(HalfMap { slices })
    }

    pub fn slices(&self) -> &[SliceHalves] {
        &self.slices
    }

    /// The slice with exactly this dimension range, if present.
    pub fn slice_at(&self, dim_lo: usize, dim_hi: usize) -> Option<&SliceHalves> {
        self.slices
            .iter()
            .find(|s| s.dim_lo == dim_lo && s.dim_hi == dim_hi)
    }

    /// Advance every slice across one shuffle transition.
    pub fn advance(&self, s_t: &Shuffle, s_t1: &Shuffle) -> Result<HalfMap> {
        let slices = self
            .slices
            .iter()
            .map(|s| s.advance(s_t, s_t1))
            .collect::<Result<Vec<_>>>()?;
        Ok(HalfMap { slices })
    }
}
