//! Ground state of the continuum well -½∂² + Ṽ(s) and the fourth-derivative
//! error bound it implies.

use clockforge::evolution::{
    continuum_ground_state, fourth_derivative_bound, galilean_reference, DEFAULT_HALF_WIDTH, DEFAULT_SPACING,
};

fn main() -> clockforge::Result<()> {
    let eta = 4.0;
    let cgs = continuum_ground_state(eta, DEFAULT_HALF_WIDTH, DEFAULT_SPACING)?;
    println!("eta = {eta}: epsilon0 = {:.8} (refinement shift {:.1e})", cgs.epsilon0, cgs.refinement_shift);
    for s in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
        println!("  phi({s}) = {:.6e}", cgs.value(s));
    }
    println!("int |phi''''|^2 = {:.4}", cgs.fourth_derivative_norm_sq());
    for l in [20, 100] {
        let bound = fourth_derivative_bound(&cgs, l, 40.0)?;
        println!("  L = {l:>3}, tau = 40: bound {bound:.3}, per site {:.4}", bound / (l + 1) as f64);
    }

    let tau = 40.0;
    let reference = galilean_reference(&cgs, 1.0 / tau, 5.0 * tau, 10)?;
    let peak =
        (0..reference.dim()).max_by(|&a, &b| reference.amplitudes[a].norm().total_cmp(&reference.amplitudes[b].norm()));
    println!("reference at t = 5 tau peaks on site {}", peak.unwrap_or(0));
    Ok(())
}
