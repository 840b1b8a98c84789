//! Quantum circuits and their history states.
//!
//! Qubit 0 is the most significant bit of a basis index. For two-qubit
//! gates the first listed target is the most significant bit of the gate's
//! local 4×4 matrix, so `CNOT 0 1` means control 0, target 1.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::Rng;

use crate::{Error, Result, C64};

/// Largest qubit count accepted by [`run_circuit`].
pub const MAX_CIRCUIT_QUBITS: usize = 24;

/// Tolerance on `max |U†U - I|` for a gate to count as unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// A one- or two-qubit unitary acting on specific qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    label: String,
    targets: Vec<usize>,
    /// Row-major `2^arity × 2^arity` matrix.
    matrix: Vec<C64>,
}

impl Gate {
    /// Build a gate from an explicit row-major matrix, checking shape,
    /// distinct targets and unitarity.
    pub fn new(label: impl Into<String>, targets: Vec<usize>, matrix: Vec<C64>) -> Result<Self> {
        let label = label.into();
        let arity = targets.len();
        if !(1..=2).contains(&arity) {
            return Err(Error::InvalidParameter(format!(
                "gate `{label}` has arity {arity}; only 1 and 2 are supported"
            )));
        }
        if arity == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidParameter(format!("gate `{label}` repeats target {}", targets[0])));
        }
        let dim = 1 << arity;
        if matrix.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "gate `{label}` needs {} matrix entries, got {}",
                dim * dim,
                matrix.len()
            )));
        }
        let gate = Gate { label, targets, matrix };
        let deviation = gate.unitarity_deviation();
        if !(deviation <= UNITARY_TOLERANCE) {
            return Err(Error::NonUnitary { label: gate.label, deviation });
        }
        Ok(gate)
    }

    /// One of the built-in gates `I X Y Z H S T CNOT CZ` (case-insensitive).
    pub fn named(name: &str, targets: Vec<usize>) -> Result<Self> {
        let upper = name.to_ascii_uppercase();
        let matrix = named_matrix(&upper).ok_or_else(|| Error::UnknownGate(name.to_string()))?;
        let arity = if matrix.len() == 4 { 1 } else { 2 };
        if targets.len() != arity {
            return Err(Error::InvalidParameter(format!(
                "gate {upper} takes {arity} target(s), got {}",
                targets.len()
            )));
        }
        Gate::new(upper, targets, matrix)
    }

    /// General single-qubit rotation `U3(θ, φ, λ)`.
    pub fn u3(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let matrix = vec![
            C64::new(c, 0.0),
            -C64::from_polar(s, lambda),
            C64::from_polar(s, phi),
            C64::from_polar(c, phi + lambda),
        ];
        Gate { label: "U3".into(), targets: vec![target], matrix }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    /// `max |U†U - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = 1 << self.arity();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += self.matrix[k * dim + i].conj() * self.matrix[k * dim + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Apply the gate in place to an `n_qubits` state by strided iteration.
    pub fn apply(&self, amplitudes: &mut [C64], n_qubits: usize) {
        let masks: Vec<usize> = self.targets.iter().map(|&q| 1 << (n_qubits - 1 - q)).collect();
        let all = masks.iter().fold(0, |acc, m| acc | m);
        let dim = 1 << self.arity();
        // local index bit (arity-1-k) corresponds to targets[k]
        let offsets: Vec<usize> = (0..dim)
            .map(|local| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| local >> (self.arity() - 1 - k) & 1 == 1)
                    .fold(0, |acc, (_, m)| acc | m)
            })
            .collect();
        let mut scratch = [C64::new(0.0, 0.0); 4];
        for base in 0..amplitudes.len() {
            if base & all != 0 {
                continue;
            }
            for (slot, off) in scratch.iter_mut().zip(&offsets) {
                *slot = amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for col in 0..dim {
                    acc += self.matrix[row * dim + col] * scratch[col];
                }
                amplitudes[base | off] = acc;
            }
        }
    }
}

fn named_matrix(name: &str) -> Option<Vec<C64>> {
    let r = |x: f64| C64::new(x, 0.0);
    let i = |x: f64| C64::new(0.0, x);
    let z = C64::new(0.0, 0.0);
    let o = r(1.0);
    let h = r(FRAC_1_SQRT_2);
    Some(match name {
        "I" => vec![o, z, z, o],
        "X" => vec![z, o, o, z],
        "Y" => vec![z, i(-1.0), i(1.0), z],
        "Z" => vec![o, z, z, r(-1.0)],
        "H" => vec![h, h, h, -h],
        "S" => vec![o, z, z, i(1.0)],
        "T" => vec![o, z, z, C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)],
        "CNOT" | "CX" => vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
        "CZ" => vec![o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, r(-1.0)],
        _ => return None,
    })
}

/// An `n`-qubit circuit of `L ≥ 1` gates with a computational-basis input.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<Gate>,
    initial_state: usize,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, gates: Vec<Gate>, initial_state: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("circuit needs at least one qubit".into()));
        }
        if gates.is_empty() {
            return Err(Error::InvalidParameter("circuit needs at least one gate".into()));
        }
        if n_qubits < usize::BITS as usize && initial_state >> n_qubits != 0 {
            return Err(Error::InvalidParameter(format!(
                "initial basis index {initial_state} does not fit in {n_qubits} qubits"
            )));
        }
        for gate in &gates {
            if let Some(&target) = gate.targets.iter().find(|&&t| t >= n_qubits) {
                return Err(Error::TargetOutOfRange { target, n_qubits });
            }
        }
        Ok(CircuitSpec { n_qubits, gates, initial_state })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of gates, `L`.
    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    /// Dense `2^n × 2^n` unitary of the whole circuit (test helper for small n).
    pub fn dense_unitary(&self) -> Vec<Vec<C64>> {
        let dim = 1 << self.n_qubits;
        let mut columns = Vec::with_capacity(dim);
        for x in 0..dim {
            let mut psi = StateVector::basis(dim, x).amplitudes;
            for gate in &self.gates {
                gate.apply(&mut psi, self.n_qubits);
            }
            columns.push(psi);
        }
        (0..dim).map(|r| (0..dim).map(|c| columns[c][r]).collect()).collect()
    }
}

impl fmt::Display for CircuitSpec {
    /// Writes the circuit back out in the circuit file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        let bits: String = (0..self.n_qubits)
            .map(|q| if self.initial_state >> (self.n_qubits - 1 - q) & 1 == 1 { '1' } else { '0' })
            .collect();
        writeln!(f, "init {bits}")?;
        for gate in &self.gates {
            let targets: Vec<String> = gate.targets.iter().map(|t| t.to_string()).collect();
            if named_matrix(&gate.label).is_some_and(|m| m == gate.matrix) {
                writeln!(f, "gate {} {}", gate.label, targets.join(" "))?;
            } else {
                let entries: Vec<String> = gate.matrix.iter().map(|c| format!("{:e},{:e}", c.re, c.im)).collect();
                writeln!(f, "ugate {} {} {}", gate.label, targets.join(" "), entries.join(" "))?;
            }
        }
        Ok(())
    }
}

/// A complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        StateVector { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Self {
        StateVector { amplitudes: values.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// `|index⟩` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
        self
    }

    /// `max_i |self_i - other_i|` after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max)
    }
}

/// Parse the line-oriented circuit format:
///
/// ```text
/// # comment
/// qubits 2
/// init 00
/// gate H 0
/// gate CNOT 0 1
/// ugate SX 1 0.5,0.5 0.5,-0.5 0.5,-0.5 0.5,0.5
/// ```
pub fn parse_circuit(text: &str) -> Result<CircuitSpec> {
    let mut n_qubits: Option<usize> = None;
    let mut init: Option<usize> = None;
    let mut gates = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "qubits" => {
                if n_qubits.is_some() {
                    return Err(err("duplicate `qubits` directive".into()));
                }
                let [count] = rest.as_slice() else {
                    return Err(err("expected `qubits <n>`".into()));
                };
                let n: usize = count.parse().map_err(|_| err(format!("bad qubit count `{count}`")))?;
                if n == 0 {
                    return Err(err("qubit count must be at least 1".into()));
                }
                n_qubits = Some(n);
            }
            "init" => {
                let n = n_qubits.ok_or_else(|| err("`init` before `qubits`".into()))?;
                let [bits] = rest.as_slice() else {
                    return Err(err("expected `init <bitstring>`".into()));
                };
                if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
                    return Err(err(format!("init must be a {n}-character bitstring")));
                }
                init = Some(usize::from_str_radix(bits, 2).map_err(|e| err(e.to_string()))?);
            }
            "gate" => {
                let n = n_qubits.ok_or_else(|| err("`gate` before `qubits`".into()))?;
                let Some((name, target_tokens)) = rest.split_first() else {
                    return Err(err("expected `gate <NAME> <t0> [t1]`".into()));
                };
                let targets = parse_targets(target_tokens).map_err(err)?;
                check_targets(&targets, n)?;
                gates.push(Gate::named(name, targets)?);
            }
            "ugate" => {
                let n = n_qubits.ok_or_else(|| err("`ugate` before `qubits`".into()))?;
                let Some((label, tail)) = rest.split_first() else {
                    return Err(err("expected `ugate <label> <t0> [t1] <entries>`".into()));
                };
                let split = tail.iter().position(|t| t.contains(',')).unwrap_or(tail.len());
                let targets = parse_targets(&tail[..split]).map_err(err)?;
                check_targets(&targets, n)?;
                let entries = tail[split..]
                    .iter()
                    .map(|t| parse_complex(t))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                let expected = 1usize << (2 * targets.len());
                if entries.len() != expected {
                    return Err(err(format!(
                        "ugate on {} qubit(s) needs {expected} entries, got {}",
                        targets.len(),
                        entries.len()
                    )));
                }
                gates.push(Gate::new(*label, targets, entries)?);
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let n = n_qubits.ok_or(Error::Parse { line: 0, message: "missing `qubits` directive".into() })?;
    if gates.is_empty() {
        return Err(Error::Parse { line: 0, message: "circuit has no gates".into() });
    }
    CircuitSpec::new(n, gates, init.unwrap_or(0))
}

fn parse_targets(tokens: &[&str]) -> std::result::Result<Vec<usize>, String> {
    if tokens.is_empty() || tokens.len() > 2 {
        return Err(format!("expected 1 or 2 target qubits, got {}", tokens.len()));
    }
    tokens.iter().map(|t| t.parse().map_err(|_| format!("bad target `{t}`"))).collect()
}

fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    match targets.iter().find(|&&t| t >= n_qubits) {
        Some(&target) => Err(Error::TargetOutOfRange { target, n_qubits }),
        None => Ok(()),
    }
}

fn parse_complex(token: &str) -> std::result::Result<C64, String> {
    let (re, im) = token.split_once(',').ok_or_else(|| format!("bad entry `{token}`"))?;
    let re: f64 = re.parse().map_err(|_| format!("bad real part in `{token}`"))?;
    let im: f64 = im.parse().map_err(|_| format!("bad imaginary part in `{token}`"))?;
    Ok(C64::new(re, im))
}

/// Run the circuit and return the history `[|α_0⟩, …, |α_L⟩]`.
pub fn run_circuit(circuit: &CircuitSpec) -> Result<Vec<StateVector>> {
    let n = circuit.n_qubits;
    if n > MAX_CIRCUIT_QUBITS {
        return Err(Error::DimensionCap(format!("{n} qubits exceeds the cap of {MAX_CIRCUIT_QUBITS}")));
    }
    let mut state = StateVector::basis(1 << n, circuit.initial_state);
    let mut history = Vec::with_capacity(circuit.gates.len() + 1);
    history.push(state.clone());
    for gate in &circuit.gates {
        gate.apply(&mut state.amplitudes, n);
        history.push(state.clone());
    }
    Ok(history)
}

/// Random circuit mixing built-in gates and random single-qubit rotations.
pub fn random_circuit<R: Rng + ?Sized>(n_qubits: usize, n_gates: usize, rng: &mut R) -> Result<CircuitSpec> {
    const ONE_QUBIT: [&str; 7] = ["I", "X", "Y", "Z", "H", "S", "T"];
    let mut gates = Vec::with_capacity(n_gates);
    for _ in 0..n_gates {
        let two_qubit = n_qubits >= 2 && rng.gen_bool(0.35);
        let gate = if two_qubit {
            let a = rng.gen_range(0..n_qubits);
            let mut b = rng.gen_range(0..n_qubits - 1);
            if b >= a {
                b += 1;
            }
            let name = if rng.gen_bool(0.5) { "CNOT" } else { "CZ" };
            Gate::named(name, vec![a, b])?
        } else if rng.gen_bool(0.5) {
            let name = ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())];
            Gate::named(name, vec![rng.gen_range(0..n_qubits)])?
        } else {
            let tau = std::f64::consts::TAU;
            Gate::u3(
                rng.gen_range(0..n_qubits),
                rng.gen_range(0.0..tau),
                rng.gen_range(0.0..tau),
                rng.gen_range(0.0..tau),
            )
        };
        gates.push(gate);
    }
    let initial = rng.gen_range(0..1usize << n_qubits);
    CircuitSpec::new(n_qubits, gates, initial)
}
