//! Discretisation error of the moving well against its continuum limit.
//!
//! The reference trajectory is the Galilean-boosted continuum ground state.
//! Both it and the propagated state are unit vectors on the sites, and the
//! error is measured after removing their relative global phase:
//! `‖r - e^{iθ}ψ‖² = 2(1 - |⟨r|ψ⟩|)`. Multiplying by `L + 1` converts it to
//! the convention `‖U‖² = L + 1` in which the fourth-derivative bound is
//! stated.

use serde::{Deserialize, Serialize};

use super::continuum::{fourth_derivative_bound, galilean_reference, ContinuumGroundState};
use super::propagate::{propagate, EvolutionResult, PropagateOptions};
use crate::circuit::StateVector;
use crate::reduced::{build_hi_reduced, Schedule, ScheduleKind};
use crate::spectral::lowest_eigenpairs;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// `‖E(t)‖²` with `‖U‖² = L + 1`.
    pub abs_error_sq: Vec<f64>,
    /// `‖E(t)‖² / ‖U(t)‖²`.
    pub rel_error_sq: Vec<f64>,
    pub bound: Option<f64>,
}

impl ErrorSeries {
    pub fn max_abs(&self) -> f64 {
        self.abs_error_sq.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_rel(&self) -> f64 {
        self.rel_error_sq.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_rel(&self) -> f64 {
        self.rel_error_sq.last().copied().unwrap_or(0.0)
    }
}

/// Phase-aligned `‖r - ψ/‖ψ‖‖²` for unit `r`.
pub fn aligned_distance_sq(reference: &StateVector, state: &StateVector) -> f64 {
    let overlap: C64 = reference.inner(state);
    (2.0 * (1.0 - overlap.norm() / state.norm())).max(0.0)
}

/// Compare the recorded states of a moving-well run with the continuum reference.
pub fn error_series(result: &EvolutionResult, cgs: &ContinuumGroundState, tau: f64) -> Result<ErrorSeries> {
    let p = &result.params;
    if p.kind != ScheduleKind::Stage2MovingWell {
        return Err(Error::InvalidParameter("error series needs a moving-well (stage 2) run".into()));
    }
    if p.tau != tau || p.eta != cgs.eta {
        return Err(Error::InvalidParameter(format!(
            "run has (eta, tau) = ({}, {}), reference has ({}, {tau})",
            p.eta, p.tau, cgs.eta
        )));
    }
    let sites = (p.l + 1) as f64;
    let mut rel = Vec::with_capacity(result.times.len());
    for (&t, state) in result.times.iter().zip(&result.states) {
        let reference = galilean_reference(cgs, 1.0 / tau, t, p.l)?;
        rel.push(aligned_distance_sq(&reference, state));
    }
    Ok(ErrorSeries {
        times: result.times.clone(),
        abs_error_sq: rel.iter().map(|r| r * sites).collect(),
        rel_error_sq: rel,
        bound: Some(fourth_derivative_bound(cgs, p.l, tau)?),
    })
}

/// `a·g₀ + √(1 - a²)·g₁` from the two lowest states of `H_I(0)`; its
/// overlap with the instantaneous ground state is `a`.
pub fn mixed_initial_state(l: usize, eta: f64, tau: f64, overlap: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::InvalidParameter(format!("initial overlap must be in [0, 1], got {overlap}")));
    }
    let h = build_hi_reduced(l, eta, tau, 0.0)?;
    let pairs = lowest_eigenpairs(&h, 2)?;
    let b = (1.0 - overlap * overlap).sqrt();
    let mixed: Vec<f64> = pairs[0].vector.iter().zip(&pairs[1].vector).map(|(g0, g1)| overlap * g0 + b * g1).collect();
    Ok(StateVector::from_real(&mixed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStudyConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub eta: f64,
    pub tau: f64,
    /// Overlap of the initial state with the ground state of `H_I(0)`.
    pub initial_overlap: f64,
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorStudy {
    pub evolution: EvolutionResult,
    pub errors: ErrorSeries,
}

/// Run the moving well alone from a (possibly degraded) ground state of
/// `H_I(0)` and measure the error against the continuum reference.
pub fn run_error_study(config: &ErrorStudyConfig, cgs: &ContinuumGroundState) -> Result<ErrorStudy> {
    let schedule = Schedule::stage2(config.l, config.eta, config.tau)?;
    let psi0 = mixed_initial_state(config.l, config.eta, config.tau, config.initial_overlap)?;
    let evolution = propagate(&schedule, &psi0, &PropagateOptions { dt: config.dt, ..Default::default() })?;
    let errors = error_series(&evolution, cgs, config.tau)?;
    Ok(ErrorStudy { evolution, errors })
}
