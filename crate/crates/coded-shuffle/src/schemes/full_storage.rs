//! S = N: every worker caches the whole dataset, deliveries are empty.

use std::collections::BTreeMap;

use crate::bits::Bits;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::shuffle::Shuffle;
use crate::storage::{Fragment, WorkerState};

pub(super) fn place_excess_range(
    data: &Dataset,
    s0: &Shuffle,
    lo: usize,
    hi: usize,
    fragments: &mut [Vec<Fragment>],
) -> Result<()> {
    for (worker, worker_fragments) in fragments.iter_mut().enumerate() {
        for point in 0..data.n_points() {
            if s0.worker_of(point) != worker {
                worker_fragments.push(Fragment::new(
                    point,
                    lo,
                    hi,
                    data.point_slice(point, lo, hi),
                )?);
            }
        }
    }
    Ok(())
}

pub(super) fn decode_range(
    state: &WorkerState,
    s_t1: &Shuffle,
    lo: usize,
    hi: usize,
    out: &mut BTreeMap<usize, Bits>,
) -> Result<()> {
    let me = state.worker_id();
    for point in s_t1.batch(me) {
        let bits = state.range_bits(point, lo, hi).ok_or_else(|| {
            Error::ProtocolViolation(format!(
                "worker {me} is missing dimensions {lo}..{hi} of point {point} despite full storage"
            ))
        })?;
        out.entry(point).or_default().extend(&bits);
    }
    Ok(())
}

pub(super) fn update_excess_range(
    state: &WorkerState,
    s_t1: &Shuffle,
    lo: usize,
    hi: usize,
    new_excess: &mut Vec<Fragment>,
) -> Result<()> {
    let me = state.worker_id();
    for point in 0..s_t1.n_points() {
        if s_t1.worker_of(point) != me {
            let bits = state.range_bits(point, lo, hi).ok_or_else(|| {
                Error::ProtocolViolation(format!(
                    "worker {me} is missing dimensions {lo}..{hi} of point {point} despite full storage"
                ))
            })?;
            new_excess.push(Fragment::new(point, lo, hi, bits)?);
        }
    }
    Ok(())
}
