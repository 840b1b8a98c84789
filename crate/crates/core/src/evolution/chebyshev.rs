//! `exp(-i·dt·H)·ψ` by Chebyshev expansion on the spectral interval of `H`.

use crate::{Error, Result, C64};

/// Series terms below this magnitude are dropped.
pub const TRUNCATION: f64 = 1e-16;

/// Largest admissible `dt · (half-width of the spectral interval)`.
pub const STABILITY_LIMIT: f64 = 0.5;

const MAX_TERMS: usize = 200;

/// `J_0(x) … J_n(x)` for `x ≥ 0` by Miller's backward recurrence.
pub fn bessel_j(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let mut start = n.max(x.ceil() as usize) + 32;
    start += start % 2;
    let mut next = 0.0;
    let mut current = 1e-300;
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k <= n {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += if k == 0 { current } else { 2.0 * current };
        }
        if k == 0 {
            break;
        }
        let previous = 2.0 * k as f64 / x * current - next;
        next = current;
        current = previous;
        if current.abs() > 1e250 {
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            current *= 1e-250;
            norm *= 1e-250;
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Expansion coefficients `(2 - δ_k0)(-i)^k J_k(x)`, truncated.
pub fn coefficients(x: f64) -> Result<Vec<C64>> {
    let j = bessel_j(MAX_TERMS, x);
    let cut = (0..=MAX_TERMS)
        .find(|&k| k as f64 > x && j[k].abs() < TRUNCATION)
        .ok_or(Error::Truncation { terms: MAX_TERMS })?;
    let phases = [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
    Ok((0..cut).map(|k| phases[k % 4] * j[k] * if k == 0 { 1.0 } else { 2.0 }).collect())
}

/// Reusable work space for [`step`].
pub struct Workspace {
    prev: Vec<C64>,
    curr: Vec<C64>,
    next: Vec<C64>,
    acc: Vec<C64>,
}

impl Workspace {
    pub fn new(dim: usize) -> Self {
        let zero = vec![C64::new(0.0, 0.0); dim];
        Workspace { prev: zero.clone(), curr: zero.clone(), next: zero.clone(), acc: zero }
    }
}

/// Replace `psi` by `exp(-i·dt·H)·psi`, where `apply` computes `y = H x` and
/// `[lo, hi]` contains the spectrum of `H`.
pub fn step<F>(apply: F, interval: (f64, f64), dt: f64, psi: &mut [C64], work: &mut Workspace) -> Result<()>
where
    F: Fn(&[C64], &mut [C64]),
{
    let centre = 0.5 * (interval.0 + interval.1);
    let radius = 0.5 * (interval.1 - interval.0);
    let product = dt * radius;
    if product > STABILITY_LIMIT * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { product });
    }
    let coeffs = coefficients(product)?;
    let Workspace { prev, curr, next, acc } = work;
    // normalised operator (H - c)/r applied to x, written into y
    let scaled = |x: &[C64], y: &mut [C64]| {
        apply(x, y);
        if radius > 0.0 {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = (*yi - xi * centre) / radius;
            }
        } else {
            y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
    };
    prev.copy_from_slice(psi);
    for (a, p) in acc.iter_mut().zip(prev.iter()) {
        *a = p * coeffs[0];
    }
    if coeffs.len() > 1 {
        scaled(prev, curr);
        for (a, c) in acc.iter_mut().zip(curr.iter()) {
            *a += c * coeffs[1];
        }
        for &ck in &coeffs[2..] {
            scaled(curr, next);
            for ((n, p), a) in next.iter_mut().zip(prev.iter()).zip(acc.iter_mut()) {
                *n = *n * 2.0 - p;
                *a += *n * ck;
            }
            std::mem::swap(prev, curr);
            std::mem::swap(curr, next);
        }
    }
    let phase = C64::from_polar(1.0, -dt * centre);
    for (p, a) in psi.iter_mut().zip(acc.iter()) {
        *p = a * phase;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::build_hp_reduced;
    use nalgebra::DMatrix;

    #[test]
    fn bessel_reference_values() {
        let j = bessel_j(3, 0.5);
        assert!((j[0] - 0.938469807240813).abs() < 1e-15);
        assert!((j[1] - 0.242268457674874).abs() < 1e-15);
        let j = bessel_j(2, 10.0);
        assert!((j[0] + 0.245935764451348).abs() < 1e-13);
        assert_eq!(bessel_j(2, 0.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn truncation_is_short_for_guarded_steps() {
        let c = coefficients(0.5).unwrap();
        assert!(c.len() < 16, "{}", c.len());
        let total: C64 = c.iter().sum();
        // at the top of the interval T_k(1) = 1, so the sum is e^{-ix}
        assert!((total - C64::from_polar(1.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn matches_dense_exponential() {
        let h = build_hp_reduced(6, 4.0).unwrap();
        let dt = 0.25;
        let n = h.dim();
        let mut psi: Vec<C64> = (0..n).map(|k| C64::new(1.0 / (k + 1) as f64, 0.3 * k as f64)).collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|a| *a /= norm);

        let m = DMatrix::from_fn(n, n, |i, j| h.entry(i, j));
        let eig = m.symmetric_eigen();
        let mut expected = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let v = eig.eigenvectors.column(k);
            let proj: C64 = (0..n).map(|i| psi[i] * v[i]).sum();
            let phase = C64::from_polar(1.0, -dt * eig.eigenvalues[k]);
            for i in 0..n {
                expected[i] += proj * phase * v[i];
            }
        }
        let mut work = Workspace::new(n);
        step(|x, y| h.apply_into(x, y), h.gershgorin_interval(), dt, &mut psi, &mut work).unwrap();
        for (a, b) in psi.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn guard_rejects_large_steps() {
        let h = build_hp_reduced(6, 4.0).unwrap();
        let mut psi = vec![C64::new(1.0, 0.0); 7];
        let mut work = Workspace::new(7);
        let err = step(|x, y| h.apply_into(x, y), h.gershgorin_interval(), 1.0, &mut psi, &mut work);
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
    }
}
