//! The continuum limit of the moving well: ground state of
//! `-½ ∂²_s + Ṽ(s)` with `Ṽ(s) = ½(η + 1/η) - 1 - (η/2) e^{-s²}`, and the
//! boosted (Galilean) trajectory it generates when the well moves at speed
//! `v_s = 1/τ`.

use serde::{Deserialize, Serialize};

use crate::circuit::StateVector;
use crate::reduced::{check_eta, check_tau, TridiagonalHamiltonian};
use crate::spectral::ground_state;
use crate::{Error, Result, C64};

pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_SPACING: f64 = 0.0025;

/// Largest allowed shift of `ε₀` when the grid spacing is halved.
pub const REFINEMENT_TOLERANCE: f64 = 1e-6;

/// Sampled norm² below which the reference is considered to have left the sites.
pub const MIN_SAMPLED_WEIGHT: f64 = 1e-6;

/// `Ṽ(s)`.
pub fn well_potential(eta: f64, s: f64) -> f64 {
    0.5 * (eta + 1.0 / eta) - 1.0 - 0.5 * eta * (-s * s).exp()
}

fn potential_derivatives(eta: f64, s: f64) -> (f64, f64) {
    let g = (-s * s).exp();
    (eta * s * g, eta * (1.0 - 2.0 * s * s) * g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumGroundState {
    /// Interior grid points `-S + h, …, S - h`; the wave function vanishes at `±S`.
    pub grid: Vec<f64>,
    /// Positive, normalised so that `h Σ φ² = 1`.
    pub phi: Vec<f64>,
    pub epsilon0: f64,
    pub eta: f64,
    pub spacing: f64,
    pub half_width: f64,
    /// `ε₀(h/2) - ε₀(h)`.
    pub refinement_shift: f64,
}

fn solve(eta: f64, half_width: f64, spacing: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let cells = (2.0 * half_width / spacing).round() as usize;
    let grid: Vec<f64> = (1..cells).map(|k| -half_width + k as f64 * spacing).collect();
    let inv_h2 = 1.0 / (spacing * spacing);
    let diag = grid.iter().map(|&s| inv_h2 + well_potential(eta, s)).collect();
    let h = TridiagonalHamiltonian::new(diag, vec![-0.5 * inv_h2; grid.len() - 1], "continuum")?;
    let pair = ground_state(&h)?;
    let scale = (spacing * pair.vector.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let phi = pair.vector.iter().map(|x| x / scale).collect();
    Ok((grid, phi, pair.value))
}

/// Ground state on `[-S, S]` with Dirichlet ends; fails when halving the
/// spacing moves `ε₀` by more than [`REFINEMENT_TOLERANCE`].
pub fn continuum_ground_state(eta: f64, half_width: f64, spacing: f64) -> Result<ContinuumGroundState> {
    check_eta(eta)?;
    if !(half_width >= 8.0) || !half_width.is_finite() {
        return Err(Error::InvalidParameter(format!("half-width must be >= 8, got {half_width}")));
    }
    if !(spacing > 0.0 && spacing <= 0.1) {
        return Err(Error::InvalidParameter(format!("grid spacing must be in (0, 0.1], got {spacing}")));
    }
    let (grid, phi, epsilon0) = solve(eta, half_width, spacing)?;
    let (_, _, refined) = solve(eta, half_width, 0.5 * spacing)?;
    let shift = refined - epsilon0;
    if shift.abs() > REFINEMENT_TOLERANCE {
        return Err(Error::GridTooCoarse { shift });
    }
    Ok(ContinuumGroundState { grid, phi, epsilon0, eta, spacing, half_width, refinement_shift: shift })
}

impl ContinuumGroundState {
    /// `φ` at node `k` of the padded grid (`k = 0` and `k = cells` are the walls).
    fn node(&self, k: usize) -> f64 {
        if k == 0 || k > self.phi.len() {
            0.0
        } else {
            self.phi[k - 1]
        }
    }

    /// `φ̃(x)` by four-point Lagrange interpolation; zero outside `[-S, S]`.
    pub fn value(&self, x: f64) -> f64 {
        let cells = self.phi.len() + 1;
        let u = (x + self.half_width) / self.spacing;
        if !(0.0..=cells as f64).contains(&u) {
            return 0.0;
        }
        let i = (u.floor() as usize).min(cells - 1);
        let first = i.saturating_sub(1).min(cells.saturating_sub(3));
        let nodes = [first, first + 1, first + 2, first + 3];
        let mut total = 0.0;
        for (a, &ka) in nodes.iter().enumerate() {
            let mut weight = 1.0;
            for (b, &kb) in nodes.iter().enumerate() {
                if a != b {
                    weight *= (u - kb as f64) / (ka as f64 - kb as f64);
                }
            }
            total += weight * self.node(ka);
        }
        total
    }

    /// `φ̃'` on the interior grid by central differences.
    pub fn derivative(&self) -> Vec<f64> {
        (1..=self.phi.len()).map(|k| (self.node(k + 1) - self.node(k - 1)) / (2.0 * self.spacing)).collect()
    }

    /// `φ̃⁽⁴⁾ = [4(Ṽ - ε₀)² + 2Ṽ''] φ̃ + 4Ṽ' φ̃'` on the interior grid.
    pub fn fourth_derivative(&self) -> Vec<f64> {
        let dphi = self.derivative();
        self.grid
            .iter()
            .zip(&self.phi)
            .zip(&dphi)
            .map(|((&s, &phi), &dphi)| {
                let v = well_potential(self.eta, s) - self.epsilon0;
                let (v1, v2) = potential_derivatives(self.eta, s);
                (4.0 * v * v + 2.0 * v2) * phi + 4.0 * v1 * dphi
            })
            .collect()
    }

    /// `∫ (φ̃⁽⁴⁾)² ds`.
    pub fn fourth_derivative_norm_sq(&self) -> f64 {
        self.spacing * self.fourth_derivative().iter().map(|x| x * x).sum::<f64>()
    }
}

/// Boosted ground state sampled on sites `m = 0 … L` and normalised:
/// `φ̃(m - v t) exp(i(v m - ½v²t - ε₀t))`.
pub fn galilean_reference(cgs: &ContinuumGroundState, velocity: f64, t: f64, l: usize) -> Result<StateVector> {
    let phase_t = -0.5 * velocity * velocity * t - cgs.epsilon0 * t;
    let mut amplitudes: Vec<C64> = (0..=l)
        .map(|m| {
            let m = m as f64;
            C64::from_polar(cgs.value(m - velocity * t), velocity * m + phase_t)
        })
        .collect();
    let weight: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if weight < MIN_SAMPLED_WEIGHT {
        return Err(Error::InvalidParameter(format!("reference profile has left the sites at t = {t}")));
    }
    let norm = weight.sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok(StateVector::new(amplitudes))
}

/// `(L + 1) · τ/576 · ∫ (φ̃⁽⁴⁾)² ds`: bound on `‖E(t)‖²` with `‖U‖² = L + 1`.
pub fn fourth_derivative_bound(cgs: &ContinuumGroundState, l: usize, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok((l + 1) as f64 * tau * cgs.fourth_derivative_norm_sq() / 576.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn eta4() -> &'static ContinuumGroundState {
        static CGS: OnceLock<ContinuumGroundState> = OnceLock::new();
        CGS.get_or_init(|| continuum_ground_state(4.0, DEFAULT_HALF_WIDTH, DEFAULT_SPACING).unwrap())
    }

    #[test]
    fn ground_energy_inside_well() {
        let cgs = eta4();
        assert!(cgs.epsilon0 > -0.875 && cgs.epsilon0 < 1.125);
        assert!((cgs.epsilon0 + 0.06272).abs() < 1e-4, "{}", cgs.epsilon0);
        assert!(cgs.refinement_shift.abs() <= 1e-6);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(continuum_ground_state(4.0, 10.0, 0.05), Err(Error::GridTooCoarse { .. })));
        assert!(continuum_ground_state(4.0, 5.0, 0.01).is_err());
        assert!(continuum_ground_state(4.0, 10.0, 0.2).is_err());
        assert!(continuum_ground_state(1.0, 10.0, 0.01).is_err());
    }

    #[test]
    fn normalised_positive_and_decaying() {
        let cgs = eta4();
        let norm: f64 = cgs.spacing * cgs.phi.iter().map(|x| x * x).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(cgs.phi.iter().all(|&x| x > 0.0));
        for (k, &s) in cgs.grid.iter().enumerate().skip(1) {
            if s > 3.0 {
                assert!(cgs.phi[k] < cgs.phi[k - 1]);
            } else if s < -3.0 {
                assert!(cgs.phi[k] > cgs.phi[k - 1]);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_nodes_and_is_smooth() {
        let cgs = eta4();
        for k in [0, 17, 4000, 7998] {
            assert!((cgs.value(cgs.grid[k]) - cgs.phi[k]).abs() < 1e-14);
        }
        assert_eq!(cgs.value(-10.5), 0.0);
        assert_eq!(cgs.value(10.5), 0.0);
        let x = 0.31234;
        let exact_ish = 0.5 * (cgs.value(x - 1e-9) + cgs.value(x + 1e-9));
        assert!((cgs.value(x) - exact_ish).abs() < 1e-12);
    }

    #[test]
    fn fourth_derivative_identity_matches_finite_differences() {
        let cgs = eta4();
        let identity = cgs.fourth_derivative();
        let stride = 8;
        let big_h = stride as f64 * cgs.spacing;
        let mut diff_max = 0.0f64;
        let mut peak = 0.0f64;
        for k in (2 * stride..cgs.phi.len() - 2 * stride).step_by(stride) {
            let f = |j: isize| cgs.phi[(k as isize + j * stride as isize) as usize];
            let fd = (f(-2) - 4.0 * f(-1) + 6.0 * f(0) - 4.0 * f(1) + f(2)) / big_h.powi(4);
            diff_max = diff_max.max((fd - identity[k]).abs());
            peak = peak.max(identity[k].abs());
        }
        assert!(diff_max < 2e-3 * peak, "{diff_max} vs {peak}");
        let g = cgs.fourth_derivative_norm_sq();
        assert!((g - 52.32).abs() < 0.1, "{g}");
    }

    #[test]
    fn reference_at_rest() {
        let cgs = eta4();
        let r = galilean_reference(cgs, 0.0, 0.0, 6).unwrap();
        assert!(r.amplitudes.iter().all(|a| a.im == 0.0 && a.re > 0.0));
        assert!(r.amplitudes.windows(2).all(|w| w[1].re < w[0].re));
        assert!((r.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reference_translates_with_the_well() {
        let cgs = eta4();
        let tau = 40.0;
        let (l, t) = (40, 20.0 * tau);
        let a = galilean_reference(cgs, 1.0 / tau, t, l).unwrap();
        let b = galilean_reference(cgs, 1.0 / tau, t + tau, l).unwrap();
        for m in 0..l {
            assert!((a.amplitudes[m].norm() - b.amplitudes[m + 1].norm()).abs() < 1e-6);
        }
    }

    #[test]
    fn reference_phase() {
        let cgs = eta4();
        let (v, t) = (1.0 / 40.0, 37.0);
        let r = galilean_reference(cgs, v, t, 8).unwrap();
        for (m, a) in r.amplitudes.iter().enumerate() {
            let want = v * m as f64 - 0.5 * v * v * t - cgs.epsilon0 * t;
            let diff = (a.arg() - want).rem_euclid(std::f64::consts::TAU);
            assert!(diff < 1e-12 || std::f64::consts::TAU - diff < 1e-12);
        }
    }

    #[test]
    fn reference_outside_window_is_an_error() {
        assert!(galilean_reference(eta4(), 1.0, 100.0, 20).is_err());
    }

    #[test]
    fn bound_is_linear_in_chain_length() {
        let cgs = eta4();
        let b20 = fourth_derivative_bound(cgs, 20, 40.0).unwrap();
        let b40 = fourth_derivative_bound(cgs, 40, 40.0).unwrap();
        let b100 = fourth_derivative_bound(cgs, 100, 40.0).unwrap();
        assert!((b40 / b20 - 41.0 / 21.0).abs() < 1e-12);
        assert!((b20 / 21.0 - b100 / 101.0).abs() < 1e-12);
        assert!((b20 / 21.0 - 3.633).abs() < 0.01, "{}", b20 / 21.0);
    }
}
