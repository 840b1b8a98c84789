//! Operators on the full computational ⊗ clock space.
//!
//! A full-space basis index is `x · 2^L + c`, where `x` is the computational
//! basis index (`n` bits, qubit 0 most significant) and `c` the clock
//! register (`L` bits, clock bit 0 most significant). Legal clock states are
//! unary: step `ℓ` is `1^ℓ 0^(L-ℓ)`. Nothing penalises illegal clock
//! strings; those basis states simply carry no entries.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::circuit::{run_circuit, CircuitSpec, Gate, StateVector};
use crate::reduced::{self, TridiagonalHamiltonian};
use crate::{Error, Result, C64};

/// Largest `n + L` for which full-space operators are built.
pub const MAX_FULL_BITS: usize = 22;

/// Projection entries outside the real tridiagonal band must stay below this.
pub const PROJECTION_TOLERANCE: f64 = 1e-12;

/// Clock register value for step `ℓ` of an `L`-bit unary clock.
pub fn clock_index(step: usize, l: usize) -> Result<usize> {
    if step > l {
        return Err(Error::InvalidParameter(format!("clock step {step} outside 0..={l}")));
    }
    if l >= usize::BITS as usize {
        return Err(Error::DimensionCap(format!("clock of {l} bits")));
    }
    Ok(((1usize << step) - 1) << (l - step))
}

fn check_full_dims(n: usize, l: usize) -> Result<()> {
    if n + l > MAX_FULL_BITS {
        return Err(Error::DimensionCap(format!("n + L = {} exceeds {MAX_FULL_BITS}", n + l)));
    }
    Ok(())
}

/// Nonzero matrix elements `(y, x, ⟨y|U|x⟩)` of a gate acting on `n` qubits.
fn gate_entries(gate: &Gate, n: usize) -> Vec<(usize, usize, C64)> {
    let targets = gate.targets();
    let k = targets.len();
    let local = 1usize << k;
    let shifts: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let place =
        |b: usize| -> usize { (0..k).filter(|&j| b >> (k - 1 - j) & 1 == 1).map(|j| 1usize << shifts[j]).sum() };
    let scattered: Vec<usize> = (0..local).map(place).collect();
    let matrix = gate.matrix();
    let mut out = Vec::new();
    for x in 0..1usize << n {
        let a = (0..k).fold(0, |acc, j| acc << 1 | (x >> shifts[j] & 1));
        let rest = x & !mask;
        for (b, &bits) in scattered.iter().enumerate() {
            let v = matrix[b * local + a];
            if v != C64::new(0.0, 0.0) {
                out.push((rest | bits, x, v));
            }
        }
    }
    out
}

/// Sparse Hermitian operator on the full space, stored as sorted coordinate
/// triples with duplicates merged and exact zeros dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockOperator {
    n: usize,
    l: usize,
    eta: Option<f64>,
    entries: Vec<(usize, usize, C64)>,
}

impl ClockOperator {
    fn from_triples(n: usize, l: usize, eta: Option<f64>, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != C64::new(0.0, 0.0));
        ClockOperator { n, l, eta, entries: merged }
    }

    pub fn dim(&self) -> usize {
        1 << (self.n + self.l)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn clock_len(&self) -> usize {
        self.l
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sorted `(i, j, value)` triples.
    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries
            .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
            .map_or(C64::new(0.0, 0.0), |k| self.entries[k].2)
    }

    /// Exact Hermiticity of the stored entries.
    pub fn is_hermitian(&self) -> bool {
        self.entries.iter().all(|&(i, j, v)| self.entry(j, i) == v.conj())
    }

    /// Sum of operators on the same space.
    pub fn add(&self, other: &ClockOperator) -> Result<ClockOperator> {
        if (self.n, self.l) != (other.n, other.l) {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        let entries = self.entries.iter().chain(&other.entries).copied().collect();
        Ok(ClockOperator::from_triples(self.n, self.l, self.eta.or(other.eta), entries))
    }

    pub fn scale(&self, factor: f64) -> ClockOperator {
        let entries = self.entries.iter().map(|&(i, j, v)| (i, j, v * factor)).collect();
        ClockOperator::from_triples(self.n, self.l, self.eta, entries)
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: x.dim() });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(&x.amplitudes, &mut y);
        Ok(StateVector::new(y))
    }

    /// Gershgorin interval; rows without entries contribute the point 0.
    pub fn gershgorin_interval(&self) -> (f64, f64) {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let mut k = 0;
        while k < self.entries.len() {
            let row = self.entries[k].0;
            let (mut centre, mut radius) = (0.0, 0.0);
            while k < self.entries.len() && self.entries[k].0 == row {
                let (_, j, v) = self.entries[k];
                if j == row {
                    centre = v.re;
                } else {
                    radius += v.norm();
                }
                k += 1;
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// Largest entrywise difference between two operators.
    pub fn max_abs_diff(&self, other: &ClockOperator) -> f64 {
        match self.add(&other.scale(-1.0)) {
            Ok(diff) => diff.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    /// Coordinate list, one `i j re im` line per stored entry.
    pub fn write_coordinates<W: Write>(&self, mut writer: W) -> Result<()> {
        for &(i, j, v) in &self.entries {
            writeln!(writer, "{i} {j} {:e} {:e}", v.re, v.im)?;
        }
        Ok(())
    }
}

impl fmt::Display for ClockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(i, j, v) in &self.entries {
            writeln!(f, "{i} {j} {:e} {:e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Diagonal weight `w` on every computational state of clock step `m`.
fn clock_diagonal(n: usize, l: usize, m: usize, w: f64, out: &mut Vec<(usize, usize, C64)>) {
    let c = clock_index(m, l).expect("step checked by caller");
    for x in 0..1usize << n {
        let i = x << l | c;
        out.push((i, i, C64::new(w, 0.0)));
    }
}

/// Hopping `coeff · (U_ℓ ⊗ |ℓ⟩⟨ℓ-1| + h.c.)`.
fn clock_hopping(n: usize, l: usize, step: usize, gate: &Gate, coeff: f64, out: &mut Vec<(usize, usize, C64)>) {
    let to = clock_index(step, l).expect("step checked by caller");
    let from = clock_index(step - 1, l).expect("step checked by caller");
    for (y, x, u) in gate_entries(gate, n) {
        let i = y << l | to;
        let j = x << l | from;
        out.push((i, j, u * coeff));
        out.push((j, i, u.conj() * coeff));
    }
}

/// Per-gate propagation term for gate `step` (1-based):
/// `(η/2) I⊗|ℓ-1⟩⟨ℓ-1| - ½ U⊗|ℓ⟩⟨ℓ-1| - ½ U†⊗|ℓ-1⟩⟨ℓ| + 1/(2η) I⊗|ℓ⟩⟨ℓ|`.
pub fn build_o_ell(circuit: &CircuitSpec, step: usize, eta: f64) -> Result<ClockOperator> {
    let (n, l) = (circuit.n_qubits(), circuit.num_gates());
    reduced::check_eta(eta)?;
    check_full_dims(n, l)?;
    if step == 0 || step > l {
        return Err(Error::InvalidParameter(format!("gate step {step} outside 1..={l}")));
    }
    let mut entries = Vec::new();
    clock_diagonal(n, l, step - 1, 0.5 * eta, &mut entries);
    clock_diagonal(n, l, step, 0.5 / eta, &mut entries);
    clock_hopping(n, l, step, &circuit.gates()[step - 1], -0.5, &mut entries);
    Ok(ClockOperator::from_triples(n, l, Some(eta), entries))
}

/// `I ⊗ Σ_{l=1..L} |l⟩⟨l|`.
pub fn build_full_hb(n: usize, l: usize) -> Result<ClockOperator> {
    check_full_dims(n, l)?;
    if l == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    let mut entries = Vec::new();
    for m in 1..=l {
        clock_diagonal(n, l, m, 1.0, &mut entries);
    }
    Ok(ClockOperator::from_triples(n, l, None, entries))
}

/// Sum of all per-gate terms.
pub fn build_full_hp(circuit: &CircuitSpec, eta: f64) -> Result<ClockOperator> {
    let terms: Vec<ClockOperator> =
        (1..=circuit.num_gates()).into_par_iter().map(|step| build_o_ell(circuit, step, eta)).collect::<Result<_>>()?;
    let entries = terms.into_iter().flat_map(|t| t.entries).collect();
    Ok(ClockOperator::from_triples(circuit.n_qubits(), circuit.num_gates(), Some(eta), entries))
}

/// Full-space lift of a tridiagonal operator on the history chain:
/// `Σ_m d_m I⊗|m⟩⟨m| + Σ_ℓ e_{ℓ-1} (U_ℓ⊗|ℓ⟩⟨ℓ-1| + h.c.)`.
pub fn lift_tridiagonal(circuit: &CircuitSpec, h: &TridiagonalHamiltonian) -> Result<ClockOperator> {
    let (n, l) = (circuit.n_qubits(), circuit.num_gates());
    check_full_dims(n, l)?;
    if h.dim() != l + 1 {
        return Err(Error::DimensionMismatch { expected: l + 1, actual: h.dim() });
    }
    let mut entries = Vec::new();
    for (m, &d) in h.diag().iter().enumerate() {
        clock_diagonal(n, l, m, d, &mut entries);
    }
    for (step, gate) in circuit.gates().iter().enumerate() {
        clock_hopping(n, l, step + 1, gate, h.offdiag()[step], &mut entries);
    }
    Ok(ClockOperator::from_triples(n, l, h.eta(), entries))
}

/// Moving-well Hamiltonian lifted to the full space: per-gate hoppings with
/// coefficient `-½`, clock weights replaced by the moving-well diagonal.
pub fn build_full_hi(circuit: &CircuitSpec, eta: f64, tau: f64, t: f64) -> Result<ClockOperator> {
    check_full_dims(circuit.n_qubits(), circuit.num_gates())?;
    let h = reduced::build_hi_reduced(circuit.num_gates(), eta, tau, t)?;
    lift_tridiagonal(circuit, &h)
}

/// Matrix-free version of [`lift_tridiagonal`] for time-dependent dynamics:
/// the gate hoppings are tabulated once and any tridiagonal can be applied.
#[derive(Clone, Debug)]
pub struct ClockLift {
    n: usize,
    l: usize,
    clocks: Vec<usize>,
    hops: Vec<Vec<(usize, usize, C64)>>,
}

impl ClockLift {
    pub fn new(circuit: &CircuitSpec) -> Result<Self> {
        let (n, l) = (circuit.n_qubits(), circuit.num_gates());
        check_full_dims(n, l)?;
        let clocks = (0..=l).map(|m| clock_index(m, l)).collect::<Result<_>>()?;
        let hops = circuit.gates().iter().map(|g| gate_entries(g, n)).collect();
        Ok(ClockLift { n, l, clocks, hops })
    }

    pub fn dim(&self) -> usize {
        1 << (self.n + self.l)
    }

    /// `y = lift(h) x`.
    pub fn apply_into(&self, h: &TridiagonalHamiltonian, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let l = self.l;
        for comp in 0..1usize << self.n {
            for (m, &c) in self.clocks.iter().enumerate() {
                let i = comp << l | c;
                y[i] = x[i] * h.diag()[m];
            }
        }
        for (k, hops) in self.hops.iter().enumerate() {
            let e = h.offdiag()[k];
            let (to, from) = (self.clocks[k + 1], self.clocks[k]);
            for &(a, b, u) in hops {
                let i = a << l | to;
                let j = b << l | from;
                y[i] += u * e * x[j];
                y[j] += u.conj() * e * x[i];
            }
        }
    }

    /// Interval containing the spectrum of `lift(h)`. On the legal subspace
    /// the lift is unitarily `I ⊗ h`; illegal clock states contribute 0.
    pub fn spectral_interval(&self, h: &TridiagonalHamiltonian) -> (f64, f64) {
        let (lo, hi) = h.gershgorin_interval();
        (lo.min(0.0), hi.max(0.0))
    }
}

/// The history states `|γ_ℓ⟩ = |α_ℓ⟩ ⊗ |ℓ⟩^c`, kept in factored form.
#[derive(Clone, Debug)]
pub struct GammaBasis {
    n: usize,
    l: usize,
    history: Vec<StateVector>,
    clocks: Vec<usize>,
}

impl GammaBasis {
    pub fn new(circuit: &CircuitSpec) -> Result<Self> {
        let (n, l) = (circuit.n_qubits(), circuit.num_gates());
        check_full_dims(n, l)?;
        let history = run_circuit(circuit)?;
        let clocks = (0..=l).map(|m| clock_index(m, l)).collect::<Result<_>>()?;
        Ok(GammaBasis { n, l, history, clocks })
    }

    /// Number of basis vectors, `L + 1`.
    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    pub fn full_dim(&self) -> usize {
        1 << (self.n + self.l)
    }

    pub fn history(&self) -> &[StateVector] {
        &self.history
    }

    /// Materialise `|γ_ℓ⟩` in the full space.
    pub fn vector(&self, step: usize) -> StateVector {
        self.embed(&StateVector::basis(self.len(), step))
    }

    /// `Σ_ℓ c_ℓ |γ_ℓ⟩`.
    pub fn embed(&self, coefficients: &StateVector) -> StateVector {
        let mut full = vec![C64::new(0.0, 0.0); self.full_dim()];
        for (m, (alpha, &c)) in self.history.iter().zip(&self.clocks).enumerate() {
            let coeff = coefficients.amplitudes[m];
            for (x, a) in alpha.amplitudes.iter().enumerate() {
                full[x << self.l | c] += coeff * a;
            }
        }
        StateVector::new(full)
    }

    /// `(⟨γ_0|ψ⟩, …, ⟨γ_L|ψ⟩)`.
    pub fn project_state(&self, psi: &[C64]) -> StateVector {
        let amplitudes = self
            .history
            .iter()
            .zip(&self.clocks)
            .map(|(alpha, &c)| alpha.amplitudes.iter().enumerate().map(|(x, a)| a.conj() * psi[x << self.l | c]).sum())
            .collect();
        StateVector::new(amplitudes)
    }

    /// Weight of `ψ` outside the history subspace, relative to `‖ψ‖²`.
    pub fn leakage(&self, psi: &[C64]) -> f64 {
        let total: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let inside: f64 = self.project_state(psi).amplitudes.iter().map(|a| a.norm_sqr()).sum();
        ((total - inside) / total).max(0.0)
    }

    fn decompose(&self, index: usize) -> Option<(usize, usize)> {
        let c = index & ((1usize << self.l) - 1);
        let step = c.count_ones() as usize;
        (self.clocks[step] == c).then_some((index >> self.l, step))
    }

    /// Complex `(L+1)×(L+1)` matrix `⟨γ_j|A|γ_k⟩`.
    pub fn matrix_elements(&self, op: &ClockOperator) -> Result<Vec<Vec<C64>>> {
        if op.dim() != self.full_dim() {
            return Err(Error::DimensionMismatch { expected: self.full_dim(), actual: op.dim() });
        }
        let size = self.len();
        let mut m = vec![vec![C64::new(0.0, 0.0); size]; size];
        for &(i, j, v) in op.entries() {
            if let (Some((xi, si)), Some((xj, sj))) = (self.decompose(i), self.decompose(j)) {
                m[si][sj] += self.history[si].amplitudes[xi].conj() * v * self.history[sj].amplitudes[xj];
            }
        }
        Ok(m)
    }
}

/// Project onto the history subspace and check the result is real symmetric
/// tridiagonal.
pub fn project_to_subspace(op: &ClockOperator, basis: &GammaBasis) -> Result<TridiagonalHamiltonian> {
    let m = basis.matrix_elements(op)?;
    let size = m.len();
    let mut residual = 0.0f64;
    for j in 0..size {
        for k in 0..size {
            let v = m[j][k];
            if j.abs_diff(k) > 1 {
                residual = residual.max(v.norm());
            } else {
                residual = residual.max(v.im.abs()).max((v - m[k][j].conj()).norm());
            }
        }
    }
    if residual > PROJECTION_TOLERANCE {
        return Err(Error::NotTridiagonal { residual });
    }
    let diag = (0..size).map(|j| m[j][j].re).collect();
    let offdiag = (0..size - 1).map(|j| 0.5 * (m[j][j + 1].re + m[j + 1][j].re)).collect();
    let h = TridiagonalHamiltonian::new(diag, offdiag, "projected")?;
    Ok(match op.eta() {
        Some(eta) => h.with_eta(eta),
        None => h,
    })
}

/// Largest `‖A|γ_k⟩ - Σ_j M_jk |γ_j⟩‖` over `k`; zero when the history
/// subspace is invariant under `A`.
pub fn subspace_residual(op: &ClockOperator, basis: &GammaBasis) -> Result<f64> {
    let m = basis.matrix_elements(op)?;
    let mut image = vec![C64::new(0.0, 0.0); basis.full_dim()];
    let mut worst = 0.0f64;
    for k in 0..basis.len() {
        let gamma = basis.vector(k);
        op.apply_into(&gamma.amplitudes, &mut image);
        let column = StateVector::new((0..basis.len()).map(|j| m[j][k]).collect());
        let inside = basis.embed(&column);
        let r: f64 = image.iter().zip(&inside.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum();
        worst = worst.max(r.sqrt());
    }
    Ok(worst)
}

/// Zero-energy state of the reduced problem Hamiltonian, `c_ℓ ∝ η^ℓ`.
pub fn analytic_ground_state(l: usize, eta: f64) -> Result<StateVector> {
    reduced::check_eta(eta)?;
    if l == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    // c_ℓ = η^(ℓ-L) √((1 - η^-2) / (1 - η^(-2L-2))), which never overflows
    let inv2 = eta.powi(-2);
    let norm = ((1.0 - inv2) / (1.0 - inv2.powi(l as i32 + 1))).sqrt();
    let coefficients: Vec<f64> = (0..=l).map(|m| norm * eta.powi(m as i32 - l as i32)).collect();
    Ok(StateVector::from_real(&coefficients))
}

/// `|c_L|²`: probability of finding the clock in its final state.
pub fn success_probability(l: usize, eta: f64) -> Result<f64> {
    reduced::check_eta(eta)?;
    let inv2 = eta.powi(-2);
    Ok((1.0 - inv2) / (1.0 - inv2.powi(l as i32 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, random_circuit};
    use crate::reduced::{build_hb_reduced, build_hi_reduced, build_hp_reduced};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn dense(op: &ClockOperator) -> DMatrix<num_complex::Complex64> {
        let mut m = DMatrix::zeros(op.dim(), op.dim());
        for &(i, j, v) in op.entries() {
            m[(i, j)] = v;
        }
        m
    }

    fn random(seed: u64, n: usize, l: usize) -> CircuitSpec {
        random_circuit(n, l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn unary_clock_indices() {
        assert_eq!(clock_index(0, 3).unwrap(), 0);
        assert_eq!(clock_index(2, 3).unwrap(), 0b110);
        assert_eq!(clock_index(3, 3).unwrap(), 0b111);
        assert!(clock_index(4, 3).is_err());
    }

    #[test]
    fn o_ell_identity_gate() {
        let circuit = parse_circuit("qubits 1\ngate I 0\n").unwrap();
        let o = build_o_ell(&circuit, 1, 2.0).unwrap();
        assert_eq!(o.dim(), 4);
        for x in 0..2 {
            let (a, b) = (x << 1, x << 1 | 1);
            assert_eq!(o.entry(a, a), c(1.0));
            assert_eq!(o.entry(a, b), c(-0.5));
            assert_eq!(o.entry(b, a), c(-0.5));
            assert_eq!(o.entry(b, b), c(0.25));
        }
        assert_eq!(o.entry(0, 3), c(0.0));
    }

    #[test]
    fn o_ell_x_gate_hops_between_branches() {
        let circuit = parse_circuit("qubits 1\ngate X 0\n").unwrap();
        let o = build_o_ell(&circuit, 1, 2.0).unwrap();
        // |0⟩⊗|1⟩^c is index 1, |1⟩⊗|0⟩^c is index 2
        assert_eq!(o.entry(1, 2), c(-0.5));
        assert_eq!(o.entry(2, 1), c(-0.5));
        assert_eq!(o.entry(0, 1), c(0.0));
        assert!(o.is_hermitian());
    }

    #[test]
    fn o_ell_rejects_bad_input() {
        let circuit = parse_circuit("qubits 1\ngate X 0\ngate H 0\n").unwrap();
        assert!(matches!(build_o_ell(&circuit, 1, 1.0), Err(Error::InvalidParameter(_))));
        assert!(build_o_ell(&circuit, 0, 2.0).is_err());
        assert!(build_o_ell(&circuit, 3, 2.0).is_err());
        let big = random(1, 3, 20);
        assert!(matches!(build_o_ell(&big, 1, 2.0), Err(Error::DimensionCap(_))));
        assert!(matches!(build_full_hb(10, 13), Err(Error::DimensionCap(_))));
    }

    #[test]
    fn beginning_hamiltonian_small() {
        let hb = build_full_hb(1, 1).unwrap();
        for x in 0..2 {
            assert_eq!(hb.entry(x << 1, x << 1), c(0.0));
            assert_eq!(hb.entry(x << 1 | 1, x << 1 | 1), c(1.0));
        }
        let circuit = random(3, 2, 4);
        let basis = GammaBasis::new(&circuit).unwrap();
        let hb = build_full_hb(2, 4).unwrap();
        let m = basis.matrix_elements(&hb).unwrap();
        assert!(m[0][0].norm() < 1e-15);
        for (l, row) in m.iter().enumerate().skip(1) {
            assert!((row[l] - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn problem_hamiltonian_projects_to_two_by_two() {
        let circuit = parse_circuit("qubits 1\ngate I 0\n").unwrap();
        let h =
            project_to_subspace(&build_full_hp(&circuit, 2.0).unwrap(), &GammaBasis::new(&circuit).unwrap()).unwrap();
        assert_eq!(h.diag(), &[1.0, 0.25]);
        assert_eq!(h.offdiag(), &[-0.5]);
    }

    #[test]
    fn projected_problem_hamiltonian_eta4() {
        let circuit = random(5, 1, 2);
        let basis = GammaBasis::new(&circuit).unwrap();
        let h = project_to_subspace(&build_full_hp(&circuit, 4.0).unwrap(), &basis).unwrap();
        assert!(h.max_abs_diff(&build_hp_reduced(2, 4.0).unwrap()) < 1e-12);
        assert!((h.diag()[0] - 2.0).abs() < 1e-12);
        assert!((h.diag()[1] - 2.125).abs() < 1e-12);
        assert!((h.diag()[2] - 0.125).abs() < 1e-12);
    }

    #[test]
    fn moving_well_lift_weights() {
        let circuit = random(7, 2, 5);
        let (eta, tau) = (4.0, 3.0);
        let hi = build_full_hi(&circuit, eta, tau, 0.0).unwrap();
        let x = 2usize;
        assert!((hi.entry(x << 5, x << 5).re - 0.125).abs() < 1e-15);
        let c1 = x << 5 | clock_index(1, 5).unwrap();
        assert!((hi.entry(c1, c1).re - 1.389).abs() < 1e-3);
        let hi_end = build_full_hi(&circuit, eta, tau, 5.0 * tau).unwrap();
        let cl = x << 5 | clock_index(5, 5).unwrap();
        assert!((hi_end.entry(cl, cl).re - 0.125).abs() < 1e-15);
        assert!(build_full_hi(&circuit, eta, 0.0, 0.0).is_err());
    }

    #[test]
    fn gamma_basis_single_x() {
        let circuit = parse_circuit("qubits 1\ngate X 0\n").unwrap();
        let basis = GammaBasis::new(&circuit).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis.vector(0), StateVector::basis(4, 0));
        assert_eq!(basis.vector(1), StateVector::basis(4, 0b11));
        assert_eq!(GammaBasis::new(&random(2, 2, 3)).unwrap().len(), 4);
    }

    #[test]
    fn gamma_basis_is_orthonormal() {
        for seed in 0..10 {
            let basis = GammaBasis::new(&random(seed, 3, 4)).unwrap();
            let vectors: Vec<StateVector> = (0..basis.len()).map(|k| basis.vector(k)).collect();
            for (j, a) in vectors.iter().enumerate() {
                for (k, b) in vectors.iter().enumerate() {
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert!((a.inner(b) - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn projections_match_reduced_model() {
        let (eta, tau) = (4.0, 2.5);
        for seed in 0..20 {
            let n = 1 + seed as usize % 3;
            let l = 1 + seed as usize % 6;
            let circuit = random(100 + seed, n, l);
            let basis = GammaBasis::new(&circuit).unwrap();

            let hb = build_full_hb(n, l).unwrap();
            let hp = build_full_hp(&circuit, eta).unwrap();
            let t = 0.37 * l as f64 * tau;
            let hi = build_full_hi(&circuit, eta, tau, t).unwrap();
            for op in [&hb, &hp, &hi] {
                assert!(op.is_hermitian());
            }

            let pairs = [
                (&hb, build_hb_reduced(l).unwrap()),
                (&hp, build_hp_reduced(l, eta).unwrap()),
                (&hi, build_hi_reduced(l, eta, tau, t).unwrap()),
            ];
            for (op, expected) in pairs {
                let projected = project_to_subspace(op, &basis).unwrap();
                assert!(projected.max_abs_diff(&expected) < 1e-12, "seed {seed}");
                assert!(subspace_residual(op, &basis).unwrap() < 1e-12, "seed {seed}");
            }
        }
    }

    #[test]
    fn non_invariant_operator_is_rejected() {
        // a bare Pauli X on the clock's first bit connects |0⟩^c to an
        // illegal clock string, so the history subspace is not invariant
        let circuit = parse_circuit("qubits 1\ngate H 0\ngate H 0\n").unwrap();
        let basis = GammaBasis::new(&circuit).unwrap();
        let entries = (0..8usize).map(|i| (i, i ^ 0b01, c(1.0))).collect();
        let op = ClockOperator::from_triples(1, 2, None, entries);
        assert!(subspace_residual(&op, &basis).unwrap() > 0.5);
        let entries = vec![(0, 0b11, c(1.0)), (0b11, 0, c(1.0))];
        let op = ClockOperator::from_triples(1, 2, None, entries);
        assert!(matches!(project_to_subspace(&op, &basis), Err(Error::NotTridiagonal { .. })));
    }

    #[test]
    fn lifted_dynamics_operator_matches_explicit_lift() {
        let circuit = random(11, 2, 4);
        let lift = ClockLift::new(&circuit).unwrap();
        let h = build_hi_reduced(4, 4.0, 3.0, 5.0).unwrap();
        let explicit = lift_tridiagonal(&circuit, &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        use rand::Rng;
        let x: Vec<C64> =
            (0..lift.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut a = vec![C64::new(0.0, 0.0); lift.dim()];
        let mut b = a.clone();
        lift.apply_into(&h, &x, &mut a);
        explicit.apply_into(&x, &mut b);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).norm() < 1e-14));
    }

    #[test]
    fn full_problem_hamiltonian_spectrum() {
        let eta = 4.0;
        let bound = 0.5 * (eta + 1.0 / eta) - 1.0;
        for seed in 0..6 {
            let circuit = random(200 + seed, 2, 1 + seed as usize % 3);
            let l = circuit.num_gates();
            let hp = build_full_hp(&circuit, eta).unwrap();
            let eig = dense(&hp).symmetric_eigenvalues();
            // zero eigenvalues: one per computational input plus every
            // illegal clock state; everything else sits above the bound
            let excited = eig.iter().filter(|&&e| e.abs() > 1e-9).fold(f64::INFINITY, |a, &e| a.min(e));
            assert!(eig.iter().all(|&e| e > -1e-10));
            assert!(excited >= bound - 1e-12, "{excited}");

            let basis = GammaBasis::new(&circuit).unwrap();
            let psi = basis.embed(&analytic_ground_state(l, eta).unwrap());
            let residual = hp.apply(&psi).unwrap().norm();
            assert!(residual < 1e-10);

            let (lo, hi) = hp.gershgorin_interval();
            assert!(eig.iter().all(|&e| e >= lo - 1e-12 && e <= hi + 1e-12));
        }
    }

    #[test]
    fn analytic_ground_state_values() {
        let psi = analytic_ground_state(1, 2.0).unwrap();
        assert!((psi.amplitudes[0].re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((psi.amplitudes[1].re - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((success_probability(1, 2.0).unwrap() - 0.8).abs() < 1e-15);
        assert!((success_probability(500, 4.0).unwrap() - 0.9375).abs() < 1e-15);
        assert!(analytic_ground_state(3, 1.0).is_err());
    }

    #[test]
    fn analytic_ground_state_is_null_vector_for_long_chains() {
        for eta in [2.0, 4.0, 8.0] {
            for l in [1, 2, 7, 50, 200] {
                let psi = analytic_ground_state(l, eta).unwrap();
                let coeffs: Vec<f64> = psi.amplitudes.iter().map(|a| a.re).collect();
                let h = build_hp_reduced(l, eta).unwrap();
                let r: f64 = h.apply_real(&coeffs).iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(r <= 1e-10, "eta {eta} L {l}: {r}");
                assert!((psi.norm() - 1.0).abs() < 1e-14);
                let p = coeffs[l] * coeffs[l];
                let literal =
                    (eta.powi(2 * l as i32 + 2) - eta.powi(2 * l as i32)) / (eta.powi(2 * l as i32 + 2) - 1.0);
                if literal.is_finite() {
                    assert!((p - literal).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn coordinate_export_is_sorted() {
        let circuit = parse_circuit("qubits 1\ngate X 0\n").unwrap();
        let mut buf = Vec::new();
        build_o_ell(&circuit, 1, 2.0).unwrap().write_coordinates(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let keys: Vec<(usize, usize)> = text
            .lines()
            .map(|line| {
                let f: Vec<&str> = line.split(' ').collect();
                assert_eq!(f.len(), 4);
                (f[0].parse().unwrap(), f[1].parse().unwrap())
            })
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.starts_with("0 0 1e0 0e0\n"));
    }

    #[test]
    fn canonical_equality_ignores_construction_order() {
        let circuit = random(9, 2, 3);
        let hp = build_full_hp(&circuit, 3.0).unwrap();
        let summed =
            (1..=3).rev().map(|s| build_o_ell(&circuit, s, 3.0).unwrap()).reduce(|a, b| a.add(&b).unwrap()).unwrap();
        assert!(hp.max_abs_diff(&summed) < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn built_operators_are_hermitian(seed in 0u64..10_000, n in 1usize..=3, l in 1usize..=5, eta in 1.1f64..8.0) {
            let circuit = random(seed, n, l);
            prop_assert!(build_full_hp(&circuit, eta).unwrap().is_hermitian());
            prop_assert!(build_full_hi(&circuit, eta, 2.0, 1.3).unwrap().is_hermitian());
            let basis = GammaBasis::new(&circuit).unwrap();
            let hp = build_full_hp(&circuit, eta).unwrap();
            prop_assert!(subspace_residual(&hp, &basis).unwrap() < 1e-12);
        }
    }
}
