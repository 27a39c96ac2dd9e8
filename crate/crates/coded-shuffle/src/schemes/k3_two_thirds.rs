//! K = 3 at S = 2N/3: the structurally invariant half-placement scheme.
//!
//! Placement: each worker stores its batch in full, and for every foreign
//! point it stores one of the point's two halves, so every point lives fully
//! at its processor and split into complementary halves at the other two
//! workers.
//!
//! Delivery: for each worker, take the points newly assigned to it and
//! concatenate, in ascending id order, the half of each point the worker does
//! not already hold. The master broadcasts the XOR of the three per-worker
//! operands. A worker can strip the two foreign operands (every bit of them
//! is in its own storage), leaving exactly the halves it is missing. The
//! length is `max_k m_k * d/2` bits, where `m_k` counts worker k's newly
//! assigned points.
//!
//! Update: a point that keeps its processor changes nothing. When a point
//! moves from worker q to worker p, p absorbs it fully, the third worker
//! keeps its half, and q keeps the half range formerly labeled as p's, now
//! relabeled as q's. The half structure is therefore preserved across any
//! number of transitions.

use std::collections::BTreeMap;

use crate::bits::{xor_fold, Bits};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::shuffle::Shuffle;
use crate::storage::{Fragment, SliceHalves, WorkerState};

/// Point ids newly assigned to `worker` by the transition, ascending.
fn arrivals(s_t: &Shuffle, s_t1: &Shuffle, worker: usize) -> Vec<usize> {
    s_t1.batch(worker)
        .into_iter()
        .filter(|&p| s_t.worker_of(p) != worker)
        .collect()
}

pub(super) fn expected_len_bits(s_t: &Shuffle, s_t1: &Shuffle, lo: usize, hi: usize) -> u64 {
    let max_new = (0..3)
        .map(|w| s_t.batch_size() - s_t.batch_overlap(s_t1, w))
        .max()
        .unwrap() as u64;
    max_new * ((hi - lo) / 2) as u64
}

pub(super) fn place_excess_range(
    data: &Dataset,
    s0: &Shuffle,
    lo: usize,
    hi: usize,
    fragments: &mut [Vec<Fragment>],
    slices: &mut Vec<SliceHalves>,
) -> Result<()> {
    let halves = SliceHalves::initial(s0, lo, hi)?;
    for point in 0..data.n_points() {
        for hold in &halves.point(point).holds {
            fragments[hold.holder].push(Fragment::new(
                point,
                hold.dim_lo,
                hold.dim_hi,
                data.point_slice(point, hold.dim_lo, hold.dim_hi),
            )?);
        }
    }
    slices.push(halves);
    Ok(())
}

pub(super) fn deliver_range(
    states: &[WorkerState],
    slice: &SliceHalves,
    s_t: &Shuffle,
    s_t1: &Shuffle,
) -> Result<Bits> {
    let mut operands = Vec::with_capacity(3);
    for worker in 0..3 {
        let mut operand = Bits::default();
        for point in arrivals(s_t, s_t1, worker) {
            let (m_lo, m_hi) = missing_range(slice, s_t, point, worker)?;
            let owner = s_t.worker_of(point);
            let bits = states[owner].processing().get(&point).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "worker {owner} does not hold point {point} it is supposed to be processing"
                ))
            })?;
            operand.extend(&bits.slice(m_lo, m_hi));
        }
        operands.push(operand);
    }
    Ok(xor_fold(&[&operands[0], &operands[1], &operands[2]]))
}

/// The half range of `point` that `worker` still needs: the one labeled with
/// the third worker (neither the old processor nor `worker` itself).
fn missing_range(
    slice: &SliceHalves,
    s_t: &Shuffle,
    point: usize,
    worker: usize,
) -> Result<(usize, usize)> {
    let owner = s_t.worker_of(point);
    debug_assert_ne!(owner, worker, "arrivals exclude carried-over points");
    let third = 3 - owner - worker;
    slice.held_range(point, third).ok_or_else(|| {
        Error::ProtocolState(format!(
            "half assignment has no range for point {point} at worker {third}"
        ))
    })
}

#[allow(clippy::too_many_arguments)]
pub(super) fn decode_range(
    state: &WorkerState,
    slice: &SliceHalves,
    payload: &Bits,
    s_t: &Shuffle,
    s_t1: &Shuffle,
    lo: usize,
    hi: usize,
    out: &mut BTreeMap<usize, Bits>,
) -> Result<()> {
    let me = state.worker_id();
    let half_width = (hi - lo) / 2;

    // Rebuild both foreign operands from local storage: for each point a
    // foreign worker j is missing, we either processed that point (and can
    // slice any range of it) or we are the third worker holding exactly the
    // missing half.
    let mut foreign = Vec::with_capacity(2);
    for other in (0..3).filter(|&w| w != me) {
        let mut operand = Bits::default();
        for point in arrivals(s_t, s_t1, other) {
            let (m_lo, m_hi) = missing_range(slice, s_t, point, other)?;
            let owner = s_t.worker_of(point);
            let bits = if owner == me {
                state
                    .processing()
                    .get(&point)
                    .ok_or_else(|| {
                        Error::ProtocolViolation(format!(
                            "worker {me} lacks point {point} from its own batch"
                        ))
                    })?
                    .slice(m_lo, m_hi)
            } else {
                state
                    .fragment(point, m_lo, m_hi)
                    .ok_or_else(|| {
                        Error::ProtocolViolation(format!(
                            "worker {me} lacks the {m_lo}..{m_hi} half of point {point} \
                             needed to cancel worker {other}'s operand"
                        ))
                    })?
                    .bits()
                    .clone()
            };
            operand.extend(&bits);
        }
        foreign.push(operand);
    }

    let residual = xor_fold(&[payload, &foreign[0], &foreign[1]]);

    let mut received: BTreeMap<usize, Bits> = BTreeMap::new();
    for (i, point) in arrivals(s_t, s_t1, me).into_iter().enumerate() {
        received.insert(point, residual.slice(i * half_width, (i + 1) * half_width));
    }

    for point in s_t1.batch(me) {
        let bits = if s_t.worker_of(point) == me {
            state
                .processing()
                .get(&point)
                .ok_or_else(|| {
                    Error::ProtocolViolation(format!(
                        "worker {me} lacks carried-over point {point}"
                    ))
                })?
                .slice(lo, hi)
        } else {
            let (m_lo, _m_hi) = missing_range(slice, s_t, point, me)?;
            let (h_lo, h_hi) = slice.held_range(point, me).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "half assignment has no range for point {point} at worker {me}"
                ))
            })?;
            let fresh = received
                .remove(&point)
                .expect("every non-carried point of the new batch is an arrival");
            let stored = state
                .fragment(point, h_lo, h_hi)
                .ok_or_else(|| {
                    Error::ProtocolViolation(format!(
                        "worker {me} lacks its stored {h_lo}..{h_hi} half of point {point}"
                    ))
                })?
                .bits();
            if m_lo < h_lo {
                Bits::concat([&fresh, stored])
            } else {
                Bits::concat([stored, &fresh])
            }
        };
        out.entry(point).or_default().extend(&bits);
    }
    Ok(())
}

pub(super) fn update_excess_range(
    state: &WorkerState,
    slice: &SliceHalves,
    s_t: &Shuffle,
    s_t1: &Shuffle,
    _lo: usize,
    _hi: usize,
    new_excess: &mut Vec<Fragment>,
) -> Result<()> {
    let me = state.worker_id();
    for point in 0..s_t.n_points() {
        let old_processor = slice.processor(point);
        if old_processor != s_t.worker_of(point) {
            return Err(Error::ProtocolState(format!(
                "half assignment says worker {old_processor} processes point {point}, \
                 shuffle says {}",
                s_t.worker_of(point)
            )));
        }
        let new_processor = s_t1.worker_of(point);
        if new_processor == me {
            continue; // absorbed into the processing batch
        }
        if me == old_processor && new_processor != old_processor {
            // Keep the half formerly labeled as the new processor's,
            // relabeled as ours; sliced out of our full copy.
            let (p_lo, p_hi) = slice.held_range(point, new_processor).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "half assignment has no range for point {point} at worker {new_processor}"
                ))
            })?;
            let full = state.processing().get(&point).ok_or_else(|| {
                Error::ProtocolViolation(format!(
                    "worker {me} lacks point {point} from its own batch"
                ))
            })?;
            new_excess.push(Fragment::new(point, p_lo, p_hi, full.slice(p_lo, p_hi))?);
        } else {
            // Non-processors keep their existing half untouched.
            let (h_lo, h_hi) = slice.held_range(point, me).ok_or_else(|| {
                Error::ProtocolState(format!(
                    "half assignment has no range for point {point} at worker {me}"
                ))
            })?;
            let fragment = state.fragment(point, h_lo, h_hi).ok_or_else(|| {
                Error::ProtocolViolation(format!(
                    "worker {me} lacks its stored {h_lo}..{h_hi} half of point {point}"
                ))
            })?;
            new_excess.push(fragment.clone());
        }
    }
    Ok(())
}
