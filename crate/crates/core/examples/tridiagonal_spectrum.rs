//! Eigenpairs of the reduced problem Hamiltonian via Sturm bisection and
//! inverse iteration, compared with the closed-form ground state.

use clockforge::clock::analytic_ground_state;
use clockforge::reduced::build_hp_reduced;
use clockforge::spectral::{gershgorin_bounds, lowest_eigenpairs, sturm_count};

fn main() -> clockforge::Result<()> {
    let (l, eta) = (12, 4.0);
    let h = build_hp_reduced(l, eta)?;
    println!("H_P for L = {l}, eta = {eta}: {} sites", h.dim());
    println!("eigenvalues below 1.5: {}", sturm_count(&h, 1.5));

    for (k, pair) in lowest_eigenpairs(&h, 4)?.iter().enumerate() {
        println!("  e{k} = {:+.15}", pair.value);
    }
    let g = &lowest_eigenpairs(&h, 1)?[0];
    let exact = analytic_ground_state(l, eta)?;
    let err = g.vector.iter().zip(&exact.amplitudes).map(|(a, b)| (a - b.re).abs()).fold(0.0, f64::max);
    println!("ground vector vs eta^m profile: max diff {err:.2e}");

    let (lo, hi) = gershgorin_bounds(&h)
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(c, r)| (lo.min(c - r), hi.max(c + r)));
    println!("Gershgorin enclosure [{lo:.3}, {hi:.3}]");
    Ok(())
}
