//! Coded data shuffling between a master node and K distributed workers.
//!
//! At every iteration of a distributed learning job, the master reshuffles
//! the N data points into K equal batches. Workers cache what they can
//! (`S * d` bits each, for `N/K <= S <= N` points of storage), and the master
//! broadcasts a single coded message from which every worker recovers its new
//! batch exactly. This crate implements the delivery, decoding, and storage
//! update schemes for two and three workers at every storage level, an
//! execution harness that checks every protocol constraint at every step, and
//! closed-form evaluators for the optimal storage/rate tradeoff that the
//! measured rates reproduce exactly.
//!
//! The schemes trade storage for communication:
//!
//! | workers | storage S | worst-case rate (points) |
//! |---------|-----------|--------------------------|
//! | 2       | N/2..N    | N - S                    |
//! | 3       | N/3..2N/3 | 7N/6 - 3S/2              |
//! | 3       | 2N/3..N   | N/2 - S/2                |
//!
//! Corner points are achieved by dedicated schemes ([`Scheme::k2_min`],
//! [`Scheme::k3_min`], [`Scheme::k3_two_thirds`], [`Scheme::full_storage`]);
//! every level in between comes from dimension splitting
//! ([`Scheme::memory_share`]). Rates are accounted in exact integers and
//! rationals throughout, so all optimality checks are equalities.
//!
//! Start with the runnable examples (`cargo run --example worst_case_search`)
//! or the `coded-shuffle` binary (`run`, `worstcase`, and `sweep`
//! subcommands).

pub mod bits;
pub mod bounds;
pub mod cli;
pub mod data;
pub mod error;
pub mod harness;
pub mod rate;
pub mod schemes;
pub mod shuffle;
pub mod storage;

pub use bits::{xor_fold, Bits};
pub use bounds::{
    combined_lower_bound, lower_bound_cutset, lower_bound_excess_k3, opt_rate, opt_rate_k2,
    opt_rate_k3,
};
pub use data::Dataset;
pub use error::{Error, Result};
pub use harness::{
    run_chain, verify_structural_invariance, worst_case_search, SimulationRun, WorstCaseReport,
};
pub use rate::{decimal_string, Message, RateRecord};
pub use schemes::{Scheme, SchemeKind};
pub use shuffle::{Shuffle, DEFAULT_ENUMERATION_CAP};
pub use storage::{Fragment, HalfMap, SliceHalves, WorkerState};
