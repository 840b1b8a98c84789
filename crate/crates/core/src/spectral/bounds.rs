//! Disc and perturbation bounds on the low-lying spectrum.

use crate::reduced::TridiagonalHamiltonian;

/// Per-row Gershgorin discs `(centre, radius)`.
pub fn gershgorin_bounds(h: &TridiagonalHamiltonian) -> Vec<(f64, f64)> {
    (0..h.dim()).map(|i| (h.diag()[i], h.neighbour_weight(i))).collect()
}

/// Lower bound on the stage-3 gap: `½(1/η + η) - 1 - η/(2e)`.
pub fn weyl_gap_bound(eta: f64) -> f64 {
    0.5 * (1.0 / eta + eta) - 1.0 - eta / (2.0 * std::f64::consts::E)
}

/// Lower bound on the stage-1 gap: `(1 - 1/e)/2 - 3/(2η)`.
pub fn stage1_gap_bound(eta: f64) -> f64 {
    0.5 * (1.0 - (-1.0f64).exp()) - 1.5 / eta
}
