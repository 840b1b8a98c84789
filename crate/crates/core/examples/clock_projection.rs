//! Build the full-space clock operators for a random circuit and check that
//! they act on the history subspace exactly like the tridiagonal model.

use clockforge::circuit::random_circuit;
use clockforge::clock::{
    analytic_ground_state, build_full_hb, build_full_hi, build_full_hp, project_to_subspace, subspace_residual,
    GammaBasis,
};
use clockforge::reduced::{build_hb_reduced, build_hi_reduced, build_hp_reduced};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let (n, l, eta, tau) = (2, 5, 4.0, 2.0);
    let circuit = random_circuit(n, l, &mut ChaCha8Rng::seed_from_u64(7))?;
    let basis = GammaBasis::new(&circuit)?;
    println!("random circuit: {n} qubits, {l} gates, full dimension {}", basis.full_dim());

    let hp = build_full_hp(&circuit, eta)?;
    let cases = [
        ("H_B", build_full_hb(n, l)?, build_hb_reduced(l)?),
        ("H_P", hp.clone(), build_hp_reduced(l, eta)?),
        (
            "H_I(Lτ/2)",
            build_full_hi(&circuit, eta, tau, 0.5 * l as f64 * tau)?,
            build_hi_reduced(l, eta, tau, 0.5 * l as f64 * tau)?,
        ),
    ];
    for (name, full, reduced) in &cases {
        let projected = project_to_subspace(full, &basis)?;
        println!(
            "{name:>10}: nnz {:>5}, |projected - reduced| = {:.1e}, invariance residual {:.1e}",
            full.nnz(),
            projected.max_abs_diff(reduced),
            subspace_residual(full, &basis)?
        );
    }

    let psi = basis.embed(&analytic_ground_state(l, eta)?);
    println!("|H_P psi_eta| = {:.2e}", hp.apply(&psi)?.norm());
    Ok(())
}
