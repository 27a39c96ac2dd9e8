//! Protocol execution and verification: shuffle chains with every constraint
//! checked at every step, and exhaustive worst-case search over all shuffle
//! pairs.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rate::RateRecord;
use crate::schemes::Scheme;
use crate::shuffle::Shuffle;
use crate::storage::{HalfMap, WorkerState};

/// Fixed dataset seed for worst-case searches; rates do not depend on the
/// payload values, but decodes are verified against a concrete dataset.
const SEARCH_SEED: u64 = 0x5EED;

/// A running protocol instance: scheme, ground-truth dataset, current worker
/// states, and the rate history.
///
/// Every [`step`](SimulationRun::step) verifies decodability at all workers
/// against the master's ground truth, then re-checks the budget, processing,
/// and structural invariants on the updated states. Any failure aborts with a
/// named invariant violation.
#[derive(Clone, Debug)]
pub struct SimulationRun {
    scheme: Scheme,
    dataset: Dataset,
    current: Shuffle,
    states: Vec<WorkerState>,
    half_map: Option<HalfMap>,
    history: Vec<RateRecord>,
}

impl SimulationRun {
    /// Place the initial storage for `s0` and verify it.
    pub fn new(scheme: Scheme, dataset: Dataset, s0: Shuffle) -> Result<Self> {
        let (states, half_map) = scheme.init_placement(&dataset, &s0)?;
        let run = SimulationRun {
            scheme,
            dataset,
            current: s0,
            states,
            half_map,
            history: Vec::new(),
        };
        run.check_states(&run.states, &run.current, run.half_map.as_ref())?;
        Ok(run)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn current_shuffle(&self) -> &Shuffle {
        &self.current
    }

    pub fn states(&self) -> &[WorkerState] {
        &self.states
    }

    pub fn half_map(&self) -> Option<&HalfMap> {
        self.half_map.as_ref()
    }

    pub fn history(&self) -> &[RateRecord] {
        &self.history
    }

    /// Run one delivery / decode / update round into the `next` shuffle.
    pub fn step(&mut self, next: &Shuffle) -> Result<RateRecord> {
        let msg = self
            .scheme
            .deliver(&self.states, self.half_map.as_ref(), &self.current, next)?;

        // Decodability: every worker must recover its new batch bit-exactly
        // from its own storage plus the broadcast.
        for state in &self.states {
            let decoded =
                self.scheme
                    .decode(state, self.half_map.as_ref(), &msg, &self.current, next)?;
            let batch = next.batch(state.worker_id());
            let decoded_ids: Vec<usize> = decoded.keys().copied().collect();
            if decoded_ids != batch {
                return Err(Error::invariant(
                    "decodability",
                    format!(
                        "worker {} decoded points {decoded_ids:?}, expected {batch:?}",
                        state.worker_id()
                    ),
                ));
            }
            for (point, bits) in &decoded {
                if bits != self.dataset.point(*point) {
                    return Err(Error::invariant(
                        "decodability",
                        format!(
                            "worker {} decoded point {point} incorrectly",
                            state.worker_id()
                        ),
                    ));
                }
            }
        }

        let mut new_states = Vec::with_capacity(self.states.len());
        let mut new_map: Option<Option<HalfMap>> = None;
        for state in &self.states {
            let (next_state, next_map) =
                self.scheme
                    .update(state, self.half_map.as_ref(), &msg, &self.current, next)?;
            match &new_map {
                None => new_map = Some(next_map),
                Some(prev) => {
                    if prev != &next_map {
                        return Err(Error::invariant(
                            "half-map-determinism",
                            format!(
                                "worker {} derived a different half assignment",
                                state.worker_id()
                            ),
                        ));
                    }
                }
            }
            new_states.push(next_state);
        }
        let new_map = new_map.expect("at least one worker");
        self.check_states(&new_states, next, new_map.as_ref())?;

        let record = RateRecord::new(
            self.history.len() as u64,
            msg.length_bits(),
            self.dataset.dim_bits(),
            self.current.clone(),
            next.clone(),
        );
        self.states = new_states;
        self.half_map = new_map;
        self.current = next.clone();
        self.history.push(record.clone());
        Ok(record)
    }

    /// Budget equality, processing exactness, and (when applicable) the
    /// structural half-placement invariant.
    fn check_states(
        &self,
        states: &[WorkerState],
        shuffle: &Shuffle,
        half_map: Option<&HalfMap>,
    ) -> Result<()> {
        for state in states {
            if state.stored_bits() != state.budget_bits() {
                return Err(Error::invariant(
                    "budget",
                    format!(
                        "worker {} stores {} bits, budget is {}",
                        state.worker_id(),
                        state.stored_bits(),
                        state.budget_bits()
                    ),
                ));
            }
            let batch = shuffle.batch(state.worker_id());
            let held: Vec<usize> = state.processing().keys().copied().collect();
            if held != batch {
                return Err(Error::invariant(
                    "processing",
                    format!(
                        "worker {} is processing {held:?}, shuffle assigns {batch:?}",
                        state.worker_id()
                    ),
                ));
            }
            for (point, bits) in state.processing() {
                if bits != self.dataset.point(*point) {
                    return Err(Error::invariant(
                        "processing",
                        format!(
                            "worker {} holds corrupted payload for point {point}",
                            state.worker_id()
                        ),
                    ));
                }
            }
        }
        if let Some(half_map) = half_map {
            if !verify_structural_invariance(&self.dataset, states, half_map, shuffle) {
                return Err(Error::invariant(
                    "structural-invariance",
                    "half placement no longer covers every point with complementary halves"
                        .to_string(),
                ));
            }
        }
        Ok(())
    }
}

/// Check the half-placement structure against ground truth.
///
/// True iff, for every half-placed slice and every point: the point's
/// processor matches the shuffle and holds the full point, and each
/// non-processor holds exactly one of two disjoint half-width fragments that
/// together cover the slice, all bit-identical to the master's data.
pub fn verify_structural_invariance(
    dataset: &Dataset,
    states: &[WorkerState],
    half_map: &HalfMap,
    shuffle: &Shuffle,
) -> bool {
    for slice in half_map.slices() {
        if !slice.is_well_formed(shuffle) {
            return false;
        }
        for point in 0..dataset.n_points() {
            let processor = slice.processor(point);
            match states[processor].processing().get(&point) {
                Some(bits) if bits == dataset.point(point) => {}
                _ => return false,
            }
            for hold in &slice.point(point).holds {
                let expected = dataset.point_slice(point, hold.dim_lo, hold.dim_hi);
                match states[hold.holder].fragment(point, hold.dim_lo, hold.dim_hi) {
                    Some(fragment) if fragment.bits() == &expected => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Run `iterations` random shuffles from a seeded generator and return the
/// per-step rate records. Fully deterministic given the seed; every step
/// passes all invariant checks or the chain aborts.
pub fn run_chain(
    scheme: &Scheme,
    dim_bits: usize,
    seed: u64,
    iterations: u64,
) -> Result<Vec<RateRecord>> {
    let n = scheme.n_points();
    let k = scheme.k_workers();
    let dataset = Dataset::random(n, dim_bits, seed)?;
    let s0 = Shuffle::identity(n, k)?;
    let mut run = SimulationRun::new(scheme.clone(), dataset, s0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..iterations {
        let next = Shuffle::random(n, k, &mut rng)?;
        run.step(&next)?;
    }
    Ok(run.history.clone())
}

/// Result of an exhaustive worst-case search over all ordered shuffle pairs.
#[derive(Clone, Debug)]
pub struct WorstCaseReport {
    pub max_rate_points: Rational64,
    pub max_rate_bits: u64,
    /// Lexicographically smallest pair attaining the maximum.
    pub argmax_pair: (Shuffle, Shuffle),
    pub pairs_checked: u64,
    /// False if any pair failed to decode bit-exactly at any worker.
    pub all_decoded: bool,
    /// First pair that failed, when `all_decoded` is false.
    pub first_failure: Option<(Shuffle, Shuffle)>,
}

/// Measure the worst-case rate of a scheme by exhausting every ordered pair
/// of shuffles: re-initialize the placement at the first shuffle, run one
/// full delivery / decode / update round into the second, verify everything,
/// and record the rate.
///
/// Refuses (naming the pair count) when the enumeration exceeds `max_pairs`.
pub fn worst_case_search(
    scheme: &Scheme,
    dim_bits: usize,
    max_pairs: u64,
) -> Result<WorstCaseReport> {
    let n = scheme.n_points();
    let k = scheme.k_workers();
    let count = Shuffle::count(n, k)?;
    let pairs = count.saturating_mul(count);
    if pairs > max_pairs as u128 {
        return Err(Error::PairCapExceeded {
            pairs,
            cap: max_pairs,
        });
    }
    let shuffles = Shuffle::enumerate(n, k, max_pairs)?;
    let dataset = Dataset::random(n, dim_bits, SEARCH_SEED)?;

    let mut best: Option<(Rational64, u64, (Shuffle, Shuffle))> = None;
    let mut pairs_checked = 0u64;
    let mut all_decoded = true;
    let mut first_failure = None;

    for s_t in &shuffles {
        // Placement depends only on the first shuffle of the pair.
        let run0 = SimulationRun::new(scheme.clone(), dataset.clone(), s_t.clone())?;
        for s_t1 in &shuffles {
            pairs_checked += 1;
            let mut run = run0.clone();
            let rate = match run.step(s_t1) {
                Ok(record) => record,
                Err(err) if err.is_protocol_failure() => {
                    if first_failure.is_none() {
                        first_failure = Some((s_t.clone(), s_t1.clone()));
                    }
                    all_decoded = false;
                    continue;
                }
                Err(err) => return Err(err),
            };
            let candidate = (
                rate.rate_points,
                rate.rate_bits,
                (s_t.clone(), s_t1.clone()),
            );
            match &best {
                Some((best_rate, _, _)) if *best_rate >= rate.rate_points => {}
                _ => best = Some(candidate),
            }
        }
    }

    let (max_rate_points, max_rate_bits, argmax_pair) =
        best.ok_or_else(|| Error::ProtocolState("no shuffle pairs were checked".into()))?;
    Ok(WorstCaseReport {
        max_rate_points,
        max_rate_bits,
        argmax_pair,
        pairs_checked,
        all_decoded,
        first_failure,
    })
}
