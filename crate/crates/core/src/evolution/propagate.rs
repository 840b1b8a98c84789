//! Exponential-midpoint propagation through a schedule:
//! `ψ(t + dt) = exp(-i·dt·H(t + dt/2)) ψ(t)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::chebyshev::{self, Workspace, STABILITY_LIMIT};
use super::errors::ErrorSeries;
use crate::circuit::{CircuitSpec, StateVector};
use crate::clock::{ClockLift, GammaBasis};
use crate::reduced::{Endpoint, Ramp, Schedule, ScheduleKind, StagePoint, TridiagonalHamiltonian};
use crate::spectral::ground_state;
use crate::{Error, Result, C64};

/// Upper bound on the number of recorded samples per run.
pub const MAX_RECORDS: usize = 2000;

/// Default steps per site for the moving well.
pub const STEPS_PER_SITE: f64 = 200.0;

/// Default steps across an interpolation stage.
pub const STEPS_PER_RAMP: f64 = 2000.0;

#[derive(Clone, Debug, Default)]
pub struct PropagateOptions {
    /// Fixed step; by default chosen per stage and clamped by the stability guard.
    pub dt: Option<f64>,
    /// Record every this many steps; by default `⌈steps / 2000⌉`.
    pub record_every: Option<usize>,
    /// Skip the instantaneous ground-state overlaps (filled with NaN).
    pub skip_overlap: bool,
}

/// A stretch of uniform steps between two schedule breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Segment {
    pub fn dt(&self) -> f64 {
        (self.end - self.start) / self.steps as f64
    }

    fn time(&self, j: usize) -> f64 {
        if j == self.steps {
            self.end
        } else {
            self.start + j as f64 * self.dt()
        }
    }
}

fn half_width(h: &TridiagonalHamiltonian) -> f64 {
    let (lo, hi) = h.gershgorin_interval();
    0.5 * (hi - lo)
}

/// Split a schedule into uniform-step segments aligned with its breakpoints.
pub fn plan_steps(schedule: &Schedule, dt: Option<f64>) -> Result<Vec<Segment>> {
    if let Some(dt) = dt {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
    }
    let p = schedule.params();
    let points = schedule.breakpoints();
    let mut segments = Vec::new();
    for w in points.windows(2) {
        let (start, end) = (w[0], w[1]);
        let length = end - start;
        if length <= 0.0 {
            continue;
        }
        let step = match dt {
            Some(dt) => dt,
            None => match schedule.stage_at(0.5 * (start + end))? {
                StagePoint::MovingWell(_) => (p.tau / STEPS_PER_SITE).min(STABILITY_LIMIT / (0.25 * p.eta + 1.0)),
                StagePoint::Interpolation { from, to, .. } => {
                    // the Gershgorin half-width is convex along a linear path
                    let hw = half_width(&schedule.endpoint(from)?).max(half_width(&schedule.endpoint(to)?));
                    let mut dt = length / STEPS_PER_RAMP;
                    if hw > 0.0 {
                        dt = dt.min(STABILITY_LIMIT / hw);
                    }
                    dt
                }
            },
        };
        let steps = ((length / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        segments.push(Segment { start, end, steps });
    }
    Ok(segments)
}

/// Run parameters echoed into outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub kind: ScheduleKind,
    #[serde(rename = "L")]
    pub l: usize,
    pub eta: f64,
    pub tau: f64,
    pub t1: f64,
    pub t3: f64,
    pub naive_time: f64,
    pub ramp: Ramp,
    pub total_time: f64,
    pub steps: usize,
    pub max_dt: f64,
    pub record_every: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    pub params: RunParams,
    pub times: Vec<f64>,
    /// `|⟨ψ(t)|g(t)⟩|` with `g(t)` the ground state of `H(t)`.
    pub overlap: Vec<f64>,
    pub norm: Vec<f64>,
    /// Recorded snapshots, aligned with `times`.
    pub states: Vec<StateVector>,
    pub final_state: StateVector,
    pub final_overlap: f64,
    /// `|⟨γ_L|ψ(T)⟩|²`.
    pub success_probability: f64,
}

impl EvolutionResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Overlap spread `max - min` over the recorded samples.
    pub fn overlap_range(&self) -> f64 {
        let max = self.overlap.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.overlap.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// CSV `t,overlap,norm`, extended by `abs_err_sq,rel_err_sq` when an
    /// error series over the same samples is supplied.
    pub fn write_csv<W: Write>(&self, writer: W, errors: Option<&ErrorSeries>) -> Result<()> {
        if let Some(e) = errors {
            if e.times.len() != self.times.len() {
                return Err(Error::DimensionMismatch { expected: self.times.len(), actual: e.times.len() });
            }
        }
        let mut csv = csv::Writer::from_writer(writer);
        match errors {
            Some(_) => csv.write_record(["t", "overlap", "norm", "abs_err_sq", "rel_err_sq"])?,
            None => csv.write_record(["t", "overlap", "norm"])?,
        }
        for k in 0..self.times.len() {
            match errors {
                Some(e) => {
                    csv.serialize((self.times[k], self.overlap[k], self.norm[k], e.abs_error_sq[k], e.rel_error_sq[k]))?
                }
                None => csv.serialize((self.times[k], self.overlap[k], self.norm[k]))?,
            }
        }
        csv.flush()?;
        Ok(())
    }

    /// `{params, final_overlap, success_probability[, runtime_seconds]}`.
    pub fn summary(&self, runtime_seconds: Option<f64>) -> serde_json::Value {
        let mut value = serde_json::json!({
            "params": self.params,
            "final_overlap": self.final_overlap,
            "success_probability": self.success_probability,
            "max_norm_drift": self.max_norm_drift(),
        });
        if let Some(r) = runtime_seconds {
            value["runtime_seconds"] = serde_json::json!(r);
        }
        value
    }
}

/// `|⟨state|g⟩|` for the ground state `g` of `h`.
pub fn instantaneous_overlap(state: &StateVector, h: &TridiagonalHamiltonian) -> Result<f64> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: state.dim() });
    }
    let ground = ground_state(h)?;
    Ok(state.amplitudes.iter().zip(&ground.vector).map(|(a, g)| a * g).sum::<C64>().norm())
}

fn norm(psi: &[C64]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Walk the step plan, calling `advance(h_mid, dt, psi)` for every step and
/// `record(t, psi)` at the sampled times.
fn drive<A, R>(
    schedule: &Schedule,
    segments: &[Segment],
    record_every: usize,
    psi: &mut [C64],
    mut advance: A,
    mut record: R,
) -> Result<()>
where
    A: FnMut(&TridiagonalHamiltonian, f64, &mut [C64]) -> Result<()>,
    R: FnMut(f64, &[C64]) -> Result<()>,
{
    record(0.0, psi)?;
    let total: usize = segments.iter().map(|s| s.steps).sum();
    let mut k = 0;
    for segment in segments {
        let dt = segment.dt();
        for j in 0..segment.steps {
            let mid = 0.5 * (segment.time(j) + segment.time(j + 1));
            let h = schedule.hamiltonian_at(mid)?;
            advance(&h, dt, psi)?;
            k += 1;
            if k % record_every == 0 || k == total {
                record(segment.time(j + 1), psi)?;
            }
        }
    }
    Ok(())
}

fn record_interval(segments: &[Segment], requested: Option<usize>) -> usize {
    let total: usize = segments.iter().map(|s| s.steps).sum();
    requested.unwrap_or_else(|| total.div_ceil(MAX_RECORDS)).max(1)
}

fn run_params(schedule: &Schedule, segments: &[Segment], record_every: usize) -> RunParams {
    let p = schedule.params();
    RunParams {
        kind: schedule.kind(),
        l: p.l,
        eta: p.eta,
        tau: p.tau,
        t1: p.t1,
        t3: p.t3,
        naive_time: p.naive_time,
        ramp: p.ramp,
        total_time: schedule.total_time(),
        steps: segments.iter().map(|s| s.steps).sum(),
        max_dt: segments.iter().map(|s| s.dt()).fold(0.0, f64::max),
        record_every,
    }
}

/// Integrate `i dψ/dt = H(t) ψ` through the schedule in the reduced space.
pub fn propagate(schedule: &Schedule, psi0: &StateVector, options: &PropagateOptions) -> Result<EvolutionResult> {
    let dim = schedule.sites();
    if psi0.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: psi0.dim() });
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("initial state has norm {}", psi0.norm())));
    }
    let segments = plan_steps(schedule, options.dt)?;
    let record_every = record_interval(&segments, options.record_every);

    let mut psi = psi0.amplitudes.clone();
    let mut work = Workspace::new(dim);
    let mut times = Vec::new();
    let mut overlap = Vec::new();
    let mut norms = Vec::new();
    let mut states = Vec::new();
    let skip = options.skip_overlap;
    drive(
        schedule,
        &segments,
        record_every,
        &mut psi,
        |h, dt, psi| chebyshev::step(|x, y| h.apply_into(x, y), h.gershgorin_interval(), dt, psi, &mut work),
        |t, psi| {
            let state = StateVector::new(psi.to_vec());
            let ov = if skip { f64::NAN } else { instantaneous_overlap(&state, &schedule.hamiltonian_at(t)?)? };
            times.push(t);
            overlap.push(ov);
            norms.push(norm(psi));
            states.push(state);
            Ok(())
        },
    )?;

    let final_state = StateVector::new(psi);
    let final_overlap = match overlap.last() {
        Some(v) if !v.is_nan() => *v,
        _ => instantaneous_overlap(&final_state, &schedule.hamiltonian_at(schedule.total_time())?)?,
    };
    let success_probability = final_state.amplitudes[dim - 1].norm_sqr();
    Ok(EvolutionResult {
        params: run_params(schedule, &segments, record_every),
        times,
        overlap,
        norm: norms,
        states,
        final_state,
        final_overlap,
        success_probability,
    })
}

/// `|γ_0⟩`: all amplitude on the first site.
pub fn initial_site_state(l: usize) -> StateVector {
    StateVector::basis(l + 1, 0)
}

/// Stages 1–3 from `|γ_0⟩`.
pub fn run_three_stage(
    l: usize,
    eta: f64,
    tau: f64,
    t1: f64,
    t3: f64,
    ramp: Ramp,
    dt: Option<f64>,
) -> Result<EvolutionResult> {
    let schedule = Schedule::three_stage(l, eta, tau, t1, t3, ramp)?;
    propagate(&schedule, &initial_site_state(l), &PropagateOptions { dt, ..Default::default() })
}

/// The naive interpolation from `|γ_0⟩` over total time `T`.
pub fn run_naive(l: usize, eta: f64, total_time: f64, ramp: Ramp, dt: Option<f64>) -> Result<EvolutionResult> {
    let schedule = Schedule::naive(l, eta, total_time, ramp)?;
    propagate(&schedule, &initial_site_state(l), &PropagateOptions { dt, ..Default::default() })
}

/// Outcome of a full-space run under the lifted Hamiltonians.
#[derive(Clone, Debug, PartialEq)]
pub struct FullSpaceRun {
    /// `⟨γ_ℓ|ψ(T)⟩` for `ℓ = 0 … L`.
    pub projected: StateVector,
    /// Largest weight outside the history subspace at any recorded time.
    pub max_leakage: f64,
    pub final_norm: f64,
}

/// Propagate `|γ_0⟩` in the full computational ⊗ clock space.
pub fn propagate_full(schedule: &Schedule, circuit: &CircuitSpec, options: &PropagateOptions) -> Result<FullSpaceRun> {
    if circuit.num_gates() != schedule.params().l {
        return Err(Error::DimensionMismatch { expected: schedule.params().l, actual: circuit.num_gates() });
    }
    let lift = ClockLift::new(circuit)?;
    let basis = GammaBasis::new(circuit)?;
    let segments = plan_steps(schedule, options.dt)?;
    let record_every = record_interval(&segments, options.record_every);
    let mut psi = basis.vector(0).amplitudes;
    let mut work = Workspace::new(lift.dim());
    let mut max_leakage = 0.0f64;
    drive(
        schedule,
        &segments,
        record_every,
        &mut psi,
        |h, dt, psi| chebyshev::step(|x, y| lift.apply_into(h, x, y), lift.spectral_interval(h), dt, psi, &mut work),
        |_, psi| {
            max_leakage = max_leakage.max(basis.leakage(psi));
            Ok(())
        },
    )?;
    Ok(FullSpaceRun { projected: basis.project_state(&psi), max_leakage, final_norm: norm(&psi) })
}

/// Endpoint Hamiltonian at the end of a schedule.
pub fn final_hamiltonian(schedule: &Schedule) -> Result<TridiagonalHamiltonian> {
    match schedule.kind() {
        ScheduleKind::Stage2MovingWell => schedule.endpoint(Endpoint::MovingWell(schedule.total_time())),
        _ => schedule.hamiltonian_at(schedule.total_time()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_circuit;
    use crate::clock::analytic_ground_state;
    use crate::reduced::{build_hi_reduced, build_hp_reduced};
    use crate::spectral::{lowest_eigenpairs, naive_min_gap, GapRoute};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn distance(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn diagonal_eigenstate_stays_put() {
        // naive schedule with T = 0 never leaves H_B
        let result = run_naive(1, 4.0, 0.0, Ramp::Linear, None).unwrap();
        assert_eq!(result.final_state, initial_site_state(1));
        assert_eq!(result.times, vec![0.0]);
        assert!((result.final_overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn problem_ground_state_is_stationary() {
        let l = 10;
        let hp = build_hp_reduced(l, 4.0).unwrap();
        let psi0 = analytic_ground_state(l, 4.0).unwrap();
        let mut psi = psi0.amplitudes.clone();
        let mut work = Workspace::new(l + 1);
        let dt = 0.25;
        for _ in 0..400 {
            chebyshev::step(|x, y| hp.apply_into(x, y), hp.gershgorin_interval(), dt, &mut psi, &mut work).unwrap();
        }
        let state = StateVector::new(psi);
        assert!((instantaneous_overlap(&state, &hp).unwrap() - 1.0).abs() < 1e-10);
        assert!((instantaneous_overlap(&psi0, &hp).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn overlap_limits() {
        let h = build_hi_reduced(12, 4.0, 10.0, 35.0).unwrap();
        let pairs = lowest_eigenpairs(&h, 2).unwrap();
        let g = StateVector::from_real(&pairs[0].vector);
        let e = StateVector::from_real(&pairs[1].vector);
        assert!((instantaneous_overlap(&g, &h).unwrap() - 1.0).abs() < 1e-12);
        assert!(instantaneous_overlap(&e, &h).unwrap() < 1e-10);
        assert!(instantaneous_overlap(&initial_site_state(3), &h).is_err());
    }

    #[test]
    fn step_plan_aligns_with_breakpoints() {
        let schedule = Schedule::three_stage(4, 4.0, 10.0, 50.0, 30.0, Ramp::Linear).unwrap();
        let plan = plan_steps(&schedule, None).unwrap();
        assert_eq!(plan.len(), 3);
        assert_eq!((plan[0].start, plan[0].end), (0.0, 50.0));
        assert_eq!((plan[1].start, plan[1].end), (50.0, 90.0));
        assert_eq!(plan[1].steps, 800);
        assert!(plan[0].dt() <= 50.0 / 2000.0 + 1e-15);
        let naive = Schedule::naive(12, 4.0, 1000.0, Ramp::Linear).unwrap();
        let plan = plan_steps(&naive, None).unwrap();
        // T/2000 = 0.5 is clamped by the stability guard
        assert!(plan[0].dt() * half_width(&build_hp_reduced(12, 4.0).unwrap()) <= STABILITY_LIMIT);
        assert!(plan_steps(&naive, Some(-1.0)).is_err());
    }

    #[test]
    fn explicit_step_violating_guard_is_rejected() {
        let err = run_naive(4, 4.0, 10.0, Ramp::Linear, Some(1.0));
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn recording_is_decimated() {
        let result = run_naive(4, 4.0, 100.0, Ramp::Linear, Some(0.01)).unwrap();
        assert_eq!(result.params.steps, 10_000);
        assert_eq!(result.params.record_every, 5);
        assert_eq!(result.times.len(), 2001);
        assert_eq!(*result.times.last().unwrap(), 100.0);
        assert!(result.max_norm_drift() < 1e-12);
    }

    #[test]
    fn second_order_self_convergence() {
        let schedule = Schedule::naive(4, 4.0, 20.0, Ramp::Linear).unwrap();
        let run = |dt: f64| {
            let options = PropagateOptions { dt: Some(dt), skip_overlap: true, ..Default::default() };
            propagate(&schedule, &initial_site_state(4), &options).unwrap().final_state
        };
        let dt = 0.1;
        let reference = run(dt / 8.0);
        let coarse = distance(&run(dt), &reference);
        let fine = distance(&run(dt / 2.0), &reference);
        let factor = coarse / fine;
        assert!((3.6..=4.4).contains(&factor), "{factor}");
    }

    #[test]
    fn three_stage_tracks_ground_state() {
        let result = run_three_stage(20, 4.0, 40.0, 50.0, 50.0, Ramp::Linear, None).unwrap();
        assert!(result.final_overlap > 0.99, "{}", result.final_overlap);
        assert!((result.success_probability - 0.9375).abs() < 0.01, "{}", result.success_probability);
        assert!(result.max_norm_drift() < 1e-8);
    }

    #[test]
    fn fast_moving_well_fails() {
        let result = run_three_stage(20, 4.0, 0.5, 50.0, 50.0, Ramp::Linear, None).unwrap();
        assert!(result.success_probability < 0.5, "{}", result.success_probability);
    }

    #[test]
    fn naive_path_small_chain_is_adiabatic_when_slow() {
        let l = 4;
        let gap = naive_min_gap(l, 4.0, GapRoute::Eigensolver).unwrap();
        let t = 10.0 / (gap * gap);
        let result = run_naive(l, 4.0, t, Ramp::Linear, None).unwrap();
        assert!(result.final_overlap > 0.99, "{}", result.final_overlap);
        assert!(result.max_norm_drift() < 1e-8);
    }

    #[test]
    fn stage1_overlap_improves_with_time() {
        let finals: Vec<f64> = [10.0, 30.0, 100.0, 300.0]
            .iter()
            .map(|&t1| {
                let schedule = Schedule::stage1(10, 4.0, 40.0, t1, Ramp::Linear).unwrap();
                propagate(&schedule, &initial_site_state(10), &PropagateOptions::default()).unwrap().final_overlap
            })
            .collect();
        assert!(finals.windows(2).all(|w| w[1] > w[0]), "{finals:?}");
        assert!(finals[3] > 0.999);
    }

    #[test]
    fn full_space_dynamics_match_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n, l) in [(1, 3), (2, 4), (2, 5)] {
            let circuit = random_circuit(n, l, &mut rng).unwrap();
            let schedule = Schedule::three_stage(l, 4.0, 3.0, 5.0, 5.0, Ramp::Smoothstep).unwrap();
            let options = PropagateOptions { skip_overlap: true, ..Default::default() };
            let full = propagate_full(&schedule, &circuit, &options).unwrap();
            let reduced = propagate(&schedule, &initial_site_state(l), &options).unwrap();
            assert!(distance(&full.projected, &reduced.final_state) < 1e-8);
            assert!(full.max_leakage < 1e-10, "{}", full.max_leakage);
            assert!((full.final_norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_and_summary() {
        let result = run_naive(2, 4.0, 0.5, Ramp::Linear, Some(0.25)).unwrap();
        let mut buf = Vec::new();
        result.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,overlap,norm\n0.0,"));
        assert_eq!(text.lines().count(), 4);
        let summary = result.summary(None);
        assert!(summary.get("runtime_seconds").is_none());
        assert_eq!(summary["params"]["L"], 2);
        assert!(result.summary(Some(1.5))["runtime_seconds"].is_number());
    }
}
