//! Propagate in the full computational ⊗ clock space and confirm the state
//! never leaves the history subspace.

use clockforge::circuit::random_circuit;
use clockforge::evolution::{initial_site_state, propagate, propagate_full, PropagateOptions};
use clockforge::reduced::{Ramp, Schedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let options = PropagateOptions { skip_overlap: true, ..Default::default() };
    for (n, l) in [(1, 3), (2, 4), (3, 5)] {
        let circuit = random_circuit(n, l, &mut rng)?;
        let schedule = Schedule::three_stage(l, 4.0, 3.0, 5.0, 5.0, Ramp::Smoothstep)?;
        let full = propagate_full(&schedule, &circuit, &options)?;
        let reduced = propagate(&schedule, &initial_site_state(l), &options)?;
        let diff = full.projected.distance_up_to_phase(&reduced.final_state);
        println!("n = {n}, L = {l}: dim 2^{:<2} leakage {:.1e}, |full - reduced| {diff:.1e}", n + l, full.max_leakage);
    }
    Ok(())
}
