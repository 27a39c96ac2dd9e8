//! Walk through one full shuffle transition at desk scale: place storage for
//! three workers, broadcast a single coded unit, and watch every worker
//! decode its new batch and update its storage without breaking the half
//! placement.
//!
//! ```bash
//! cargo run --example delivery_trace
//! ```

use coded_shuffle::{Dataset, HalfMap, Result, Scheme, Shuffle, WorkerState};

fn print_states(label: &str, states: &[WorkerState], shuffle: &Shuffle) {
    println!("{label} (shuffle {shuffle}):");
    for state in states {
        let processing: Vec<String> = state
            .processing()
            .iter()
            .map(|(point, bits)| format!("x{point}={bits}"))
            .collect();
        let excess: Vec<String> = state
            .excess()
            .iter()
            .map(|f| format!("x{}[{}..{}]={}", f.point_id, f.dim_lo, f.dim_hi, f.bits()))
            .collect();
        println!(
            "  worker {}: processing {{{}}}  excess {{{}}}  ({} of {} bits)",
            state.worker_id(),
            processing.join(", "),
            excess.join(", "),
            state.stored_bits(),
            state.budget_bits()
        );
    }
}

fn print_half_map(half_map: &HalfMap) {
    for slice in half_map.slices() {
        println!(
            "half assignment for dimensions {}..{}:",
            slice.dim_lo(),
            slice.dim_hi()
        );
        for point in 0..slice.n_points() {
            let halves = slice.point(point);
            let holds: Vec<String> = halves
                .holds
                .iter()
                .map(|h| format!("w{} holds [{}..{})", h.holder, h.dim_lo, h.dim_hi))
                .collect();
            println!(
                "  x{point}: processed by w{}, {}",
                halves.processor,
                holds.join(", ")
            );
        }
    }
}

fn main() -> Result<()> {
    // Three points of four bits each; storage for two points per worker.
    let data = Dataset::random(3, 4, 2024)?;
    let scheme = Scheme::k3_two_thirds(3)?;
    println!("scheme: {scheme}");
    println!();
    for point in 0..data.n_points() {
        println!("ground truth x{point} = {}", data.point(point));
    }
    println!();

    let s_t = Shuffle::identity(3, 3)?;
    let (states, half_map) = scheme.init_placement(&data, &s_t)?;
    let half_map = half_map.expect("this scheme places halves");
    print_states("initial placement", &states, &s_t);
    print_half_map(&half_map);
    println!();

    // Rotate all three batches: the worst case, every worker gets a new point.
    let s_t1 = Shuffle::parse("1,2,0", 3)?;
    let msg = scheme.deliver(&states, Some(&half_map), &s_t, &s_t1)?;
    println!(
        "transition {s_t} -> {s_t1}: broadcast {} bits ({} points): {}",
        msg.length_bits(),
        msg.rate_points(data.dim_bits()),
        msg.payload()
    );
    println!();

    let mut next_states = Vec::new();
    let mut next_map = None;
    for state in &states {
        let decoded = scheme.decode(state, Some(&half_map), &msg, &s_t, &s_t1)?;
        for (point, bits) in &decoded {
            let ok = bits == data.point(*point);
            println!(
                "worker {} decoded x{point} = {bits} {}",
                state.worker_id(),
                if ok { "(bit-exact)" } else { "(WRONG)" }
            );
        }
        let (next, map) = scheme.update(state, Some(&half_map), &msg, &s_t, &s_t1)?;
        next_states.push(next);
        next_map = map;
    }
    println!();

    let next_map = next_map.expect("updated half assignment");
    print_states("after the storage update", &next_states, &s_t1);
    print_half_map(&next_map);
    Ok(())
}
