//! The naive path H(s) = (1-s) H_B + s H_P: its gap closes exponentially in L
//! at a fixed crossing point.

use clockforge::reduced::{FamilyKind, InterpolationFamily};
use clockforge::spectral::{crossing_point, gap_scaling_fit, min_gap, secular_roots, GapRoute};

fn main() -> clockforge::Result<()> {
    let eta = 4.0;
    println!("crossing point s* = {:.6}", crossing_point(eta));
    println!("{:>4} {:>10} {:>14} {:>14}", "L", "s_min", "eigensolver", "secular");
    for l in (8..=24).step_by(4) {
        let family = InterpolationFamily::new(FamilyKind::Naive, l, eta)?;
        let m = min_gap(&family, 0.0, 1.0)?;
        let secular = crossing_point(eta) * secular_roots(eta, l + 1)?.gap;
        println!("{l:>4} {:>10.6} {:>14.6e} {:>14.6e}", m.location, m.gap, secular);
    }

    // deep chains are only reachable through the secular equation
    let ls: Vec<usize> = (40..=200).step_by(40).collect();
    let fit = gap_scaling_fit(eta, &ls, GapRoute::Secular)?;
    println!("secular fit over L = 40..200: slope {:.6} (-ln eta = {:.6})", fit.slope, -eta.ln());
    Ok(())
}
