//! Track the lattice moving well against the boosted continuum state, from
//! an ideal start and from degraded starts.

use clockforge::evolution::{
    continuum_ground_state, run_error_study, ErrorStudyConfig, DEFAULT_HALF_WIDTH, DEFAULT_SPACING,
};

fn main() -> clockforge::Result<()> {
    let cgs = continuum_ground_state(4.0, DEFAULT_HALF_WIDTH, DEFAULT_SPACING)?;
    println!("{:>4} {:>5} {:>10} {:>12} {:>12} {:>12}", "L", "a", "overlap", "range", "max |E|^2", "final rel");
    for overlap in [1.0, 0.9, 0.5] {
        for l in [20, 100] {
            let config = ErrorStudyConfig { l, eta: 4.0, tau: 40.0, initial_overlap: overlap, dt: None };
            let study = run_error_study(&config, &cgs)?;
            println!(
                "{l:>4} {overlap:>5} {:>10.6} {:>12.4e} {:>12.4e} {:>12.4e}",
                study.evolution.final_overlap,
                study.evolution.overlap_range(),
                study.errors.max_abs(),
                study.errors.final_rel()
            );
        }
    }
    Ok(())
}
