//! K = 2 at minimum storage (S = N/2).
//!
//! Each worker stores exactly its batch. The master pairs the departing
//! points of both batches in ascending id order and broadcasts their
//! positional XOR, so the message shrinks by one point per point of
//! batch overlap: `(N/2 - b) * d` bits for overlap `b`. With no overlap this
//! degenerates to the XOR of the two full batches.

use std::collections::BTreeMap;

use crate::bits::{xor_fold, Bits};
use crate::error::{Error, Result};
use crate::shuffle::Shuffle;
use crate::storage::WorkerState;

/// Point ids leaving `worker`'s batch across the transition, ascending.
fn departing(s_t: &Shuffle, s_t1: &Shuffle, worker: usize) -> Vec<usize> {
    s_t.batch(worker)
        .into_iter()
        .filter(|&p| s_t1.worker_of(p) != worker)
        .collect()
}

pub(super) fn expected_len_bits(s_t: &Shuffle, s_t1: &Shuffle, lo: usize, hi: usize) -> u64 {
    let overlap = s_t.batch_overlap(s_t1, 0) as u64;
    debug_assert_eq!(overlap, s_t.batch_overlap(s_t1, 1) as u64);
    (s_t.batch_size() as u64 - overlap) * (hi - lo) as u64
}

pub(super) fn deliver_range(
    states: &[WorkerState],
    s_t: &Shuffle,
    s_t1: &Shuffle,
    lo: usize,
    hi: usize,
) -> Result<Bits> {
    let first = operand(&states[0], &departing(s_t, s_t1, 0), lo, hi)?;
    let second = operand(&states[1], &departing(s_t, s_t1, 1), lo, hi)?;
    debug_assert_eq!(first.len(), second.len());
    Ok(xor_fold(&[&first, &second]))
}

fn operand(state: &WorkerState, points: &[usize], lo: usize, hi: usize) -> Result<Bits> {
    let mut out = Bits::default();
    for &point in points {
        let bits = state.processing().get(&point).ok_or_else(|| {
            Error::ProtocolState(format!(
                "worker {} does not hold point {point} it is supposed to be processing",
                state.worker_id()
            ))
        })?;
        out.extend(&bits.slice(lo, hi));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub(super) fn decode_range(
    state: &WorkerState,
    payload: &Bits,
    s_t: &Shuffle,
    s_t1: &Shuffle,
    lo: usize,
    hi: usize,
    out: &mut BTreeMap<usize, Bits>,
) -> Result<()> {
    let me = state.worker_id();
    let other = 1 - me;
    let width = hi - lo;
    let mine_departing = departing(s_t, s_t1, me);
    let theirs_departing = departing(s_t, s_t1, other);
    debug_assert_eq!(mine_departing.len(), theirs_departing.len());

    // Cancel my departing points out of each chunk to expose the arrivals.
    let mut recovered: BTreeMap<usize, Bits> = BTreeMap::new();
    for (i, (&gone, &arriving)) in mine_departing.iter().zip(&theirs_departing).enumerate() {
        let chunk = payload.slice(i * width, (i + 1) * width);
        let held = state.processing().get(&gone).ok_or_else(|| {
            Error::ProtocolViolation(format!(
                "worker {me} lacks point {gone} needed to cancel its side of the broadcast"
            ))
        })?;
        recovered.insert(arriving, xor_fold(&[&chunk, &held.slice(lo, hi)]));
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
            recovered.remove(&point).ok_or_else(|| {
                Error::ProtocolViolation(format!("worker {me} could not recover point {point}"))
            })?
        };
        out.entry(point).or_default().extend(&bits);
    }
    Ok(())
}
