//! Lowest eigenpairs of real symmetric tridiagonal matrices: Sturm-sequence
//! bisection for the values, inverse iteration for the vectors.

use serde::{Deserialize, Serialize};

use super::dd::Dd;
use crate::reduced::TridiagonalHamiltonian;
use crate::{Error, Result};

const MAX_INVERSE_ITERATIONS: usize = 50;

/// Splittings below this fraction of `‖h‖` are refined in double-double.
pub const REFINE_THRESHOLD: f64 = 1e-6;

fn scale_of(h: &TridiagonalHamiltonian) -> f64 {
    h.inf_norm().max(1.0)
}

fn pivmin(h: &TridiagonalHamiltonian) -> f64 {
    let emax = h.offdiag().iter().fold(1.0f64, |m, e| m.max(e * e));
    f64::MIN_POSITIVE * emax
}

/// Number of eigenvalues strictly below `x`, from the signs of the `LDLᵀ`
/// pivots of `h - x I`.
pub fn sturm_count(h: &TridiagonalHamiltonian, x: f64) -> usize {
    let (d, e) = (h.diag(), h.offdiag());
    let pmin = pivmin(h);
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let coupling = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - coupling;
        if q.abs() < pmin {
            q = -pmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// [`sturm_count`] evaluated in double-double arithmetic.
pub(crate) fn sturm_count_dd(h: &TridiagonalHamiltonian, x: Dd) -> usize {
    let (d, e) = (h.diag(), h.offdiag());
    let pmin = Dd::new(pivmin(h));
    let mut count = 0;
    let mut q = Dd::new(1.0);
    for i in 0..d.len() {
        let shifted = Dd::new(d[i]) - x;
        q = if i == 0 {
            shifted
        } else {
            let ee = Dd::new(e[i - 1]) * Dd::new(e[i - 1]);
            shifted - ee / q
        };
        if q.abs().hi < pmin.hi {
            q = -pmin;
        }
        if q.is_negative() {
            count += 1;
        }
    }
    count
}

/// Bisect for eigenvalue `index` (0-based) inside `[lo, hi]`.
fn bisect(h: &TridiagonalHamiltonian, index: usize, mut lo: f64, mut hi: f64, floor: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= floor.max(2.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            return mid;
        }
        if sturm_count(h, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

fn bisect_dd(h: &TridiagonalHamiltonian, index: usize, mut lo: Dd, mut hi: Dd, floor: f64) -> Dd {
    for _ in 0..400 {
        let width = (hi - lo).to_f64();
        let mid = Dd::midpoint(lo, hi);
        if width <= floor || mid == lo || mid == hi {
            return mid;
        }
        if sturm_count_dd(h, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Dd::midpoint(lo, hi)
}

fn check_count(h: &TridiagonalHamiltonian, k: usize) -> Result<()> {
    if k == 0 || k > h.dim() {
        return Err(Error::InvalidParameter(format!("requested {k} eigenvalues of a {}×{} matrix", h.dim(), h.dim())));
    }
    Ok(())
}

/// The `k` smallest eigenvalues in ascending order.
pub fn lowest_eigenvalues(h: &TridiagonalHamiltonian, k: usize) -> Result<Vec<f64>> {
    check_count(h, k)?;
    let scale = scale_of(h);
    let (glo, ghi) = h.gershgorin_interval();
    let pad = 4.0 * f64::EPSILON * scale + pivmin(h);
    let (lo, hi) = (glo - pad, ghi + pad);
    let floor = 1e-3 * f64::EPSILON * scale;
    Ok((0..k).map(|i| bisect(h, i, lo, hi, floor)).collect())
}

/// The two lowest eigenvalues and their splitting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLowest {
    pub e0: f64,
    pub e1: f64,
    /// `e1 - e0`, formed in double-double when the pair is nearly degenerate.
    pub gap: f64,
}

/// Lowest pair with the splitting resolved below `f64` spacing when needed.
pub fn two_lowest(h: &TridiagonalHamiltonian) -> Result<TwoLowest> {
    let values = lowest_eigenvalues(h, 2)?;
    let (e0, e1) = (values[0], values[1]);
    let scale = scale_of(h);
    if e1 - e0 >= REFINE_THRESHOLD * scale {
        return Ok(TwoLowest { e0, e1, gap: e1 - e0 });
    }
    let mut margin = 1e-12 * scale;
    let (lo, hi) = loop {
        let lo = Dd::new(e0) - Dd::new(margin);
        let hi = Dd::new(e1) + Dd::new(margin);
        if sturm_count_dd(h, lo) == 0 && sturm_count_dd(h, hi) >= 2 {
            break (lo, hi);
        }
        margin *= 16.0;
        if margin > scale {
            return Err(Error::Bracket("could not bracket the lowest eigenvalue pair".into()));
        }
    };
    let floor = 1e-31 * scale;
    let a = bisect_dd(h, 0, lo, hi, floor);
    let b = bisect_dd(h, 1, lo, hi, floor);
    Ok(TwoLowest { e0: a.to_f64(), e1: b.to_f64(), gap: (b - a).to_f64().max(0.0) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit norm, largest-magnitude component positive.
    pub vector: Vec<f64>,
}

/// LU factorisation of `T - λI` with partial pivoting.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(h: &TridiagonalHamiltonian, shift: f64, tiny: f64) -> Self {
        let n = h.dim();
        let mut dl = h.offdiag().to_vec();
        let mut d: Vec<f64> = h.diag().iter().map(|x| x - shift).collect();
        let mut du = h.offdiag().to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for p in &mut d {
            if p.abs() < tiny {
                *p = if *p < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return 0.0;
    }
    v.iter_mut().for_each(|x| *x /= peak);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm * peak
}

fn residual(h: &TridiagonalHamiltonian, value: f64, v: &[f64]) -> f64 {
    h.apply_real(v).iter().zip(v).map(|(hv, x)| (hv - value * x).powi(2)).sum::<f64>().sqrt()
}

/// Inverse iteration for one eigenvalue, orthogonal to `against`.
fn inverse_iteration(h: &TridiagonalHamiltonian, value: f64, against: &[&[f64]]) -> Result<Vec<f64>> {
    let n = h.dim();
    let scale = scale_of(h);
    let lu = ShiftedLu::new(h, value, f64::EPSILON * scale);
    let tolerance = 1e-8 * (1.0 + value.abs());
    let mut v: Vec<f64> = (0..n).map(|i| 0.5 + ((i * 7919 + 13) % 1009) as f64 / 1009.0).collect();
    normalize(&mut v);
    let mut last = f64::INFINITY;
    for iteration in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for u in against {
            let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u.iter()).for_each(|(a, b)| *a -= dot * b);
        }
        if normalize(&mut v) == 0.0 {
            return Err(Error::NoConvergence { eigenvalue: value, residual: f64::NAN });
        }
        last = residual(h, value, &v);
        if iteration >= 1 && last <= 1e-3 * tolerance.min(1e-8 * scale) {
            break;
        }
    }
    if last > tolerance {
        return Err(Error::NoConvergence { eigenvalue: value, residual: last });
    }
    let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}

/// The `k` smallest eigenvalues with unit eigenvectors.
pub fn lowest_eigenpairs(h: &TridiagonalHamiltonian, k: usize) -> Result<Vec<EigenPair>> {
    check_count(h, k)?;
    let values = if k == 2 {
        let pair = two_lowest(h)?;
        vec![pair.e0, pair.e1]
    } else {
        lowest_eigenvalues(h, k)?
    };
    let cluster = 1e-3 * scale_of(h);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    for &value in &values {
        let against: Vec<&[f64]> =
            pairs.iter().filter(|p| (p.value - value).abs() <= cluster).map(|p| p.vector.as_slice()).collect();
        let vector = inverse_iteration(h, value, &against)?;
        pairs.push(EigenPair { value, vector });
    }
    Ok(pairs)
}

/// Ground state only.
pub fn ground_state(h: &TridiagonalHamiltonian) -> Result<EigenPair> {
    let value = lowest_eigenvalues(h, 1)?[0];
    let vector = inverse_iteration(h, value, &[])?;
    Ok(EigenPair { value, vector })
}
