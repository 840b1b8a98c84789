//! Time evolution through the adiabatic schedules and the continuum
//! moving-well reference.

mod chebyshev;
mod continuum;
mod errors;
mod propagate;

pub use chebyshev::{bessel_j, STABILITY_LIMIT, TRUNCATION};
pub use continuum::{
    continuum_ground_state, fourth_derivative_bound, galilean_reference, well_potential, ContinuumGroundState,
    DEFAULT_HALF_WIDTH, DEFAULT_SPACING, MIN_SAMPLED_WEIGHT, REFINEMENT_TOLERANCE,
};
pub use errors::{
    aligned_distance_sq, error_series, mixed_initial_state, run_error_study, ErrorSeries, ErrorStudy, ErrorStudyConfig,
};
pub use propagate::{
    final_hamiltonian, initial_site_state, instantaneous_overlap, plan_steps, propagate, propagate_full, run_naive,
    run_three_stage, EvolutionResult, FullSpaceRun, PropagateOptions, RunParams, Segment, MAX_RECORDS, STEPS_PER_RAMP,
    STEPS_PER_SITE,
};
