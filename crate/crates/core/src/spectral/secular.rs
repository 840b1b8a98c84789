//! The secular equation for the two low-lying levels of the naive path at
//! its crossing point.
//!
//! At `s* = 2/(η - 1/η + 2)` the naive Hamiltonian equals `s*` times the
//! persymmetric `N×N` matrix with diagonal `(η/2, η, …, η, η/2)` and
//! couplings `-½`, `N = L + 1`. Its two edge-localised eigenvalues are
//! `λ = η - (z + 1/z)/2` where `z` solves `(z - η)² = Δ(z)²`,
//! `Δ(z) = z^{-(N-1)} (η - 1/z)`.

use serde::{Deserialize, Serialize};

use crate::reduced::TridiagonalHamiltonian;
use crate::{Error, Result};

/// Naive-path parameter at which the two edge states cross.
pub fn crossing_point(eta: f64) -> f64 {
    2.0 / (eta - 1.0 / eta + 2.0)
}

/// Persymmetric `N×N` matrix with diagonal `(η/2, η, …, η, η/2)`, couplings `-½`.
pub fn scaled_crossing_matrix(eta: f64, n: usize) -> Result<TridiagonalHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("crossing matrix needs N >= 2, got {n}")));
    }
    let mut diag = vec![eta; n];
    diag[0] = 0.5 * eta;
    diag[n - 1] = 0.5 * eta;
    Ok(TridiagonalHamiltonian::new(diag, vec![-0.5; n - 1], "crossing")?.with_eta(eta))
}

/// `Δ(z) = z^{-(N-1)} (η - 1/z)`.
pub fn delta(eta: f64, n: usize, z: f64) -> f64 {
    (-((n - 1) as f64) * z.ln()).exp() * (eta - 1.0 / z)
}

/// `f(z) = (z - η)² - Δ(z)²`.
pub fn secular_function(eta: f64, n: usize, z: f64) -> f64 {
    (z - eta).powi(2) - delta(eta, n, z).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecularSolution {
    pub eta: f64,
    pub n: usize,
    /// Root below `η`.
    pub z1: f64,
    /// Root above `η`.
    pub z2: f64,
    /// `z1 - η`; kept separately since `z1` rounds to `η` once `Δ` is tiny.
    pub w1: f64,
    /// `z2 - η`.
    pub w2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|λ1 - λ2|`, formed without cancellation.
    pub gap: f64,
    pub delta_at_eta: f64,
}

/// Bisect `g` on `[lo, hi]` (opposite signs) to relative width 1e-15.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::Bracket(format!("no sign change on [{lo}, {hi}]")));
    }
    let rising = ghi > 0.0;
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * lo.abs().max(hi.abs()) {
            break;
        }
        if (g(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Both roots of the secular equation by bisection in the offset `w = z - η`.
pub fn secular_roots(eta: f64, n: usize) -> Result<SecularSolution> {
    if !(eta >= 4.0) || !eta.is_finite() || n < 5 {
        return Err(Error::InvalidParameter(format!("secular roots need eta >= 4 and N >= 5, got eta={eta}, N={n}")));
    }
    let d = |w: f64| delta(eta, n, eta + w);
    let delta_at_eta = d(0.0);
    if delta_at_eta == 0.0 {
        return Err(Error::GapUnderflow { l: n - 1, gap: 0.0 });
    }
    let w2 = bisect(|w| w - d(w), 0.0, 1.0)?;
    let w1 = bisect(|w| w + d(w), -0.5 * (eta - 1.0), 0.0)?;
    if !(w1 < 0.0 && w2 > 0.0) {
        return Err(Error::Bracket(format!("roots out of order: w1={w1}, w2={w2}")));
    }
    let (z1, z2) = (eta + w1, eta + w2);
    let lambda = |z: f64| eta - 0.5 * (z + 1.0 / z);
    let gap = 0.5 * ((w1 - w2) * (1.0 - 1.0 / (z1 * z2))).abs();
    Ok(SecularSolution {
        eta,
        n,
        z1,
        z2,
        w1,
        w2,
        alpha1: z1.ln(),
        alpha2: z2.ln(),
        lambda1: lambda(z1),
        lambda2: lambda(z2),
        gap,
        delta_at_eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::{build_hb_reduced, build_hp_reduced};
    use crate::spectral::two_lowest;

    #[test]
    fn crossing_point_eta4() {
        assert!((crossing_point(4.0) - 0.347_826_086_956_521_7).abs() < 1e-15);
    }

    #[test]
    fn naive_path_at_crossing_is_scaled_persymmetric_matrix() {
        for eta in [4.0, 5.0, 8.0] {
            let l = 9;
            let s = crossing_point(eta);
            let naive = TridiagonalHamiltonian::interpolate(
                &build_hb_reduced(l).unwrap(),
                &build_hp_reduced(l, eta).unwrap(),
                s,
                "naive",
            )
            .unwrap();
            let scaled = scaled_crossing_matrix(eta, l + 1).unwrap().scaled(s);
            assert!(naive.max_abs_diff(&scaled) < 1e-15);
            assert!(naive.max_abs_diff(&naive.reversed()) < 1e-15);
        }
    }

    #[test]
    fn eta4_n10_roots_hug_eta() {
        let sol = secular_roots(4.0, 10).unwrap();
        assert!((sol.delta_at_eta - 3.75 * 4f64.powi(-9)).abs() < 1e-20);
        assert!((sol.delta_at_eta - 1.43e-5).abs() < 1e-7);
        assert!(1.0 < sol.z1 && sol.z1 < 4.0 && 4.0 < sol.z2);
        for w in [sol.w1, sol.w2] {
            assert!((w.abs() / sol.delta_at_eta - 1.0).abs() < 0.01);
        }
        assert!((sol.w2 - delta(4.0, 10, sol.z2)).abs() <= 1e-14 * sol.w2);
        assert!(secular_function(4.0, 10, sol.z2).abs() < 1e-18);
    }

    #[test]
    fn agrees_with_eigensolver() {
        for eta in [4.0, 5.0, 8.0] {
            for n in 8..=40 {
                let sol = secular_roots(eta, n).unwrap();
                let pair = two_lowest(&scaled_crossing_matrix(eta, n).unwrap()).unwrap();
                assert!((sol.lambda2 - pair.e0).abs() < 1e-8, "eta {eta} N {n}");
                assert!((sol.lambda1 - pair.e1).abs() < 1e-8, "eta {eta} N {n}");
                assert!(sol.gap < 0.5 * (sol.w2 - sol.w1));
                // below ~1e-22 the double-double bisection floor dominates
                if pair.gap > 1e-22 {
                    assert!(
                        (sol.gap - pair.gap).abs() <= 1e-6 * sol.gap,
                        "eta {eta} N {n}: {} vs {}",
                        sol.gap,
                        pair.gap
                    );
                }
                assert!(sol.w1 < 0.0 && sol.w2 > 0.0);
            }
        }
    }

    #[test]
    fn reproduces_high_precision_crossing_gaps() {
        // 60-digit references for the naive gap at the crossing, eta = 4
        let reference = [
            (10, 1.16617783270326e-6),
            (12, 7.2886114535174e-8),
            (14, 4.55538215844529e-9),
            (16, 2.8471138490283e-10),
            (18, 1.77944615564269e-11),
            (20, 1.11215384727668e-12),
            (22, 6.95096154547924e-14),
            (24, 4.34435096592453e-15),
        ];
        let s = crossing_point(4.0);
        for (l, want) in reference {
            let got = s * secular_roots(4.0, l + 1).unwrap().gap;
            assert!((got - want).abs() / want < 1e-10, "L {l}: {got} vs {want}");
        }
    }

    #[test]
    fn deep_regime_stays_finite() {
        let sol = secular_roots(4.0, 400).unwrap();
        assert_eq!(sol.z1, 4.0);
        assert!(sol.gap > 0.0 && sol.gap < 1e-200);
        assert!(secular_roots(3.0, 10).is_err());
        assert!(secular_roots(4.0, 4).is_err());
    }
}
