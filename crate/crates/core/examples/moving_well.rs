//! Three-stage evolution versus the naive schedule.
//!
//! The moving well drags the ground state along the chain in time linear in
//! L; the naive path with a comparable budget is stuck behind its tiny gap.

use clockforge::clock::success_probability;
use clockforge::evolution::{run_naive, run_three_stage};
use clockforge::reduced::Ramp;

fn main() -> clockforge::Result<()> {
    let (eta, tau) = (4.0, 40.0);
    for l in [10, 20, 50] {
        let r = run_three_stage(l, eta, tau, 50.0, 50.0, Ramp::Linear, None)?;
        println!(
            "three-stage L = {l:>3}, T = {:>6}: overlap {:.6}, P(success) {:.4} (ideal {:.4}), steps {}",
            r.params.total_time,
            r.final_overlap,
            r.success_probability,
            success_probability(l, eta)?,
            r.params.steps
        );
    }
    let naive = run_naive(12, eta, 1000.0, Ramp::Linear, None)?;
    println!("naive L = 12, T = 1000: overlap {:.3e}", naive.final_overlap);
    Ok(())
}
