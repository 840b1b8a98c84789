//! The stage-1 and stage-3 interpolations keep an L-independent gap above
//! their disc bounds.

use clockforge::reduced::{FamilyKind, InterpolationFamily};
use clockforge::spectral::{gap_scan, stage1_gap_bound, uniform_grid, weyl_gap_bound};

fn main() -> clockforge::Result<()> {
    let grid = uniform_grid(0.0, 1.0, 201);
    for (kind, eta, bound) in
        [(FamilyKind::Stage1, 5.0, stage1_gap_bound(5.0)), (FamilyKind::Stage3, 4.0, weyl_gap_bound(4.0))]
    {
        println!("{kind:?}, eta = {eta}, lower bound {bound:.4}");
        for l in [20, 100, 400] {
            let scan = gap_scan(&InterpolationFamily::new(kind, l, eta)?, &grid)?;
            let (s, gap) = scan.min_gap();
            println!("  L = {l:>3}: min gap {gap:.6} at s = {s:.3}");
        }
    }
    Ok(())
}
