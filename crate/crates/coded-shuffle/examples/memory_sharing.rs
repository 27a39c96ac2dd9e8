//! Build a scheme for a storage level between two corner points by splitting
//! the point dimensions into two slices, and check that storage and rate
//! combine linearly, slice by slice.
//!
//! ```bash
//! cargo run --example memory_sharing
//! ```

use num_rational::Rational64;

use coded_shuffle::{
    worst_case_search, Dataset, Result, Scheme, SchemeKind, Shuffle,
};

fn main() -> Result<()> {
    // S = 3 sits halfway between the corners S = N/3 = 2 and S = 2N/3 = 4.
    let storage = Rational64::from_integer(3);
    let scheme = Scheme::for_storage(3, 6, storage)?;
    println!("selected: {scheme}");
    let SchemeKind::MemoryShare { low, high, alpha } = scheme.kind() else {
        unreachable!("interior storage always selects memory sharing");
    };
    println!(
        "  low slice:  fraction {alpha} of the dimensions runs {}",
        low.name()
    );
    println!(
        "  high slice: the rest runs {}",
        high.name()
    );
    println!();

    // Placement: the two slices coexist in one worker state.
    let dim_bits = 12;
    let data = Dataset::random(6, dim_bits, 5)?;
    let s0 = Shuffle::identity(6, 3)?;
    let (states, half_map) = scheme.init_placement(&data, &s0)?;
    let state = &states[0];
    println!(
        "worker 0 stores {} bits = S * d = {} * {}",
        state.stored_bits(),
        storage,
        dim_bits
    );
    println!("  {} full points under processing", state.processing().len());
    println!(
        "  {} excess fragments: {}",
        state.excess().len(),
        state
            .excess()
            .iter()
            .map(|f| format!("x{}[{}..{})", f.point_id, f.dim_lo, f.dim_hi))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let half_map = half_map.expect("the high slice places halves");
    let slice = &half_map.slices()[0];
    println!(
        "  half placement lives on dimensions {}..{}",
        slice.dim_lo(),
        slice.dim_hi()
    );
    println!();

    // Worst-case rate composes linearly from the two inner schemes.
    let report = worst_case_search(&scheme, dim_bits, 100_000)?;
    let low_rate = Rational64::from_integer(4); // 2N/3 at N = 6
    let high_rate = Rational64::from_integer(1); // N/6 at N = 6
    let blended = *alpha * low_rate + (Rational64::from_integer(1) - alpha) * high_rate;
    println!(
        "measured worst case {} points = {alpha} * {low_rate} + {} * {high_rate}",
        report.max_rate_points,
        Rational64::from_integer(1) - alpha
    );
    assert_eq!(report.max_rate_points, blended);
    assert!(report.all_decoded);
    Ok(())
}
