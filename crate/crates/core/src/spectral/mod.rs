//! Spectral analysis of tridiagonal Hamiltonian families.
//!
//! Eigenvalues come from Sturm-sequence bisection, with a double-double
//! refinement for splittings too small to see in `f64`. Beyond that, the
//! naive-path gap is available in closed form through the secular equation.

mod bounds;
mod dd;
mod eigen;
mod gap;
mod scaling;
mod secular;

pub use bounds::{gershgorin_bounds, stage1_gap_bound, weyl_gap_bound};
pub use eigen::{
    ground_state, lowest_eigenpairs, lowest_eigenvalues, sturm_count, two_lowest, EigenPair, TwoLowest,
    REFINE_THRESHOLD,
};
pub use gap::{gap_scan, interior_min_gap, min_gap, uniform_grid, GapScan, MinGap, COARSE_POINTS};
pub use scaling::{fit_line, gap_scaling_fit, naive_min_gap, GapRoute, ScalingFit, GAP_FLOOR};
pub use secular::{crossing_point, delta, scaled_crossing_matrix, secular_function, secular_roots, SecularSolution};
