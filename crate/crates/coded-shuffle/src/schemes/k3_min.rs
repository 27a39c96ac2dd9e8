//! K = 3 at minimum storage (S = N/3).
//!
//! Each worker stores exactly its batch; the master broadcasts the two batch
//! XORs `{A_0 xor A_1, A_1 xor A_2}` (batches serialized in ascending id
//! order). Starting from its own batch, every worker can peel out the other
//! two, so it sees the whole dataset and keeps what the next shuffle assigns
//! to it. The cost is a constant `2 * (N/3) * d` bits per transition.

use std::collections::BTreeMap;

use crate::bits::{xor_fold, Bits};
use crate::error::{Error, Result};
use crate::shuffle::Shuffle;
use crate::storage::WorkerState;

pub(super) fn expected_len_bits(s_t: &Shuffle, lo: usize, hi: usize) -> u64 {
    2 * s_t.batch_size() as u64 * (hi - lo) as u64
}

pub(super) fn deliver_range(
    states: &[WorkerState],
    s_t: &Shuffle,
    lo: usize,
    hi: usize,
) -> Result<Bits> {
    let blobs = (0..3)
        .map(|w| batch_blob(&states[w], &s_t.batch(w), lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let first = xor_fold(&[&blobs[0], &blobs[1]]);
    let second = xor_fold(&[&blobs[1], &blobs[2]]);
    Ok(Bits::concat([&first, &second]))
}

/// Concatenated `[lo, hi)` slices of a batch in ascending id order.
fn batch_blob(state: &WorkerState, points: &[usize], lo: usize, hi: usize) -> Result<Bits> {
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
    let width = hi - lo;
    let blob_len = s_t.batch_size() * width;
    let part01 = payload.slice(0, blob_len);
    let part12 = payload.slice(blob_len, 2 * blob_len);
    let mine = batch_blob(state, &s_t.batch(me), lo, hi).map_err(|_| {
        Error::ProtocolViolation(format!("worker {me} lacks parts of its own batch"))
    })?;

    let blobs: [Bits; 3] = match me {
        0 => {
            let blob1 = xor_fold(&[&part01, &mine]);
            let blob2 = xor_fold(&[&part12, &blob1]);
            [mine, blob1, blob2]
        }
        1 => {
            let blob0 = xor_fold(&[&part01, &mine]);
            let blob2 = xor_fold(&[&part12, &mine]);
            [blob0, mine, blob2]
        }
        2 => {
            let blob1 = xor_fold(&[&part12, &mine]);
            let blob0 = xor_fold(&[&part01, &blob1]);
            [blob0, blob1, mine]
        }
        w => {
            return Err(Error::ProtocolState(format!(
                "worker index {w} in a three-worker scheme"
            )))
        }
    };

    for point in s_t1.batch(me) {
        let owner = s_t.worker_of(point);
        let rank = s_t
            .batch(owner)
            .iter()
            .position(|&p| p == point)
            .expect("point is in its owner's batch");
        let bits = blobs[owner].slice(rank * width, (rank + 1) * width);
        out.entry(point).or_default().extend(&bits);
    }
    Ok(())
}
