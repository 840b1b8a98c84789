//! Tridiagonal Hamiltonians on the history subspace and the adiabatic
//! schedules built from them.
//!
//! Sites run `m = 0 … L`. The crossing-matrix analysis in [`crate::spectral`]
//! uses matrices of size `N = L + 1`; its rows `1 … N` map to sites
//! `m = row - 1`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Real symmetric tridiagonal matrix with provenance metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    eta: Option<f64>,
    label: String,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), actual: offdiag.len() });
        }
        if !diag.iter().chain(&offdiag).all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("tridiagonal entries must be finite".into()));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag, eta: None, label: label.into() })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim()).map(|i| self.diag[i].abs() + self.neighbour_weight(i)).fold(0.0, f64::max)
    }

    /// `|e_{i-1}| + |e_i|`.
    pub(crate) fn neighbour_weight(&self, i: usize) -> f64 {
        let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
        let right = self.offdiag.get(i).map_or(0.0, |e| e.abs());
        left + right
    }

    /// Union of the Gershgorin discs as an interval `[lo, hi]`.
    pub fn gershgorin_interval(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = self.neighbour_weight(i);
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// `y = H x` for complex `x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc += x[i - 1] * self.offdiag[i - 1];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.offdiag[i];
            }
            y[i] = acc;
        }
    }

    /// `(1 - s) a + s b`.
    pub fn interpolate(a: &Self, b: &Self, s: f64, label: impl Into<String>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
        }
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (1.0 - s) * p + s * q).collect();
        let mut h = TridiagonalHamiltonian::new(mix(&a.diag, &b.diag), mix(&a.offdiag, &b.offdiag), label)?;
        h.eta = a.eta.or(b.eta);
        Ok(h)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TridiagonalHamiltonian {
            diag: self.diag.iter().map(|d| d * factor).collect(),
            offdiag: self.offdiag.iter().map(|e| e * factor).collect(),
            eta: self.eta,
            label: self.label.clone(),
        }
    }

    /// Site order reversed, `m → L - m`.
    pub fn reversed(&self) -> Self {
        TridiagonalHamiltonian {
            diag: self.diag.iter().rev().copied().collect(),
            offdiag: self.offdiag.iter().rev().copied().collect(),
            eta: self.eta,
            label: self.label.clone(),
        }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.diag
            .iter()
            .zip(&other.diag)
            .chain(self.offdiag.iter().zip(&other.offdiag))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `m,diag,offdiag_to_next`; the last row leaves the
    /// coupling field empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["m", "diag", "offdiag_to_next"])?;
        for (m, d) in self.diag.iter().enumerate() {
            let next = self.offdiag.get(m).map(|e| e.to_string()).unwrap_or_default();
            csv.write_record([m.to_string(), d.to_string(), next])?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R, label: impl Into<String>) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let mut diag = Vec::new();
        let mut offdiag = Vec::new();
        for record in csv.records() {
            let record = record?;
            let parse = |field: &str| {
                field.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad number `{field}`")))
            };
            diag.push(parse(record.get(1).unwrap_or_default())?);
            match record.get(2) {
                Some(field) if !field.is_empty() => offdiag.push(parse(field)?),
                _ => {}
            }
        }
        TridiagonalHamiltonian::new(diag, offdiag, label)
    }
}

fn check_sites(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta must be > 1, got {eta}")));
    }
    Ok(())
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be > 0, got {tau}")));
    }
    Ok(())
}

/// Beginning Hamiltonian: `diag(0, 1, …, 1)`.
pub fn build_hb_reduced(l: usize) -> Result<TridiagonalHamiltonian> {
    check_sites(l)?;
    let mut diag = vec![1.0; l + 1];
    diag[0] = 0.0;
    TridiagonalHamiltonian::new(diag, vec![0.0; l], "H_B")
}

/// Problem Hamiltonian: diagonal `(η/2, (η+1/η)/2, …, 1/(2η))`, couplings `-1/2`.
pub fn build_hp_reduced(l: usize, eta: f64) -> Result<TridiagonalHamiltonian> {
    check_sites(l)?;
    check_eta(eta)?;
    let mut diag = vec![0.5 * (eta + 1.0 / eta); l + 1];
    diag[0] = 0.5 * eta;
    diag[l] = 0.5 / eta;
    Ok(TridiagonalHamiltonian::new(diag, vec![-0.5; l], "H_P")?.with_eta(eta))
}

/// Diagonal weight of site `m` in the moving-well Hamiltonian at time `t`.
pub fn moving_well_weight(eta: f64, tau: f64, t: f64, m: usize) -> f64 {
    let x = t / tau - m as f64;
    0.5 / eta + 0.5 * eta * (1.0 - (-x * x).exp())
}

/// Moving-well Hamiltonian `H_I(t)`: a Gaussian dip centred on site `t/τ`.
pub fn build_hi_reduced(l: usize, eta: f64, tau: f64, t: f64) -> Result<TridiagonalHamiltonian> {
    check_sites(l)?;
    check_eta(eta)?;
    check_tau(tau)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter("time must be finite".into()));
    }
    let diag = (0..=l).map(|m| moving_well_weight(eta, tau, t, m)).collect();
    Ok(TridiagonalHamiltonian::new(diag, vec![-0.5; l], "H_I")?.with_eta(eta))
}

/// Interpolation profile `s(u)` for `u ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ramp {
    #[default]
    Linear,
    /// `3u² - 2u³`, continuous first derivative at the ends.
    Smoothstep,
}

impl Ramp {
    pub fn value(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Ramp::Linear => u,
            Ramp::Smoothstep => u * u * (3.0 - 2.0 * u),
        }
    }

    /// `max |ds/du|`.
    pub fn max_slope(self) -> f64 {
        match self {
            Ramp::Linear => 1.0,
            Ramp::Smoothstep => 1.5,
        }
    }
}

impl std::str::FromStr for Ramp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Ramp::Linear),
            "smoothstep" => Ok(Ramp::Smoothstep),
            other => Err(Error::InvalidParameter(format!("unknown ramp `{other}`"))),
        }
    }
}

/// One of the three fixed Hamiltonians a schedule interpolates between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint {
    Beginning,
    Problem,
    /// `H_I` evaluated at the given moving-well time.
    MovingWell(f64),
}

/// What a schedule looks like at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StagePoint {
    /// `(1 - s) from + s to`.
    Interpolation { from: Endpoint, to: Endpoint, s: f64 },
    /// `H_I(t)`.
    MovingWell(f64),
}

/// Which path a [`Schedule`] follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Naive,
    Stage1,
    Stage2MovingWell,
    Stage3,
    CompositeThreeStage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub l: usize,
    pub eta: f64,
    /// Dwell time per site for the moving well.
    pub tau: f64,
    pub t1: f64,
    pub t3: f64,
    /// Duration of the naive interpolation.
    pub naive_time: f64,
    pub ramp: Ramp,
}

/// Default duration of stages 1 and 3.
pub const DEFAULT_STAGE_TIME: f64 = 50.0;

/// A time-parameterised family of tridiagonal Hamiltonians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    kind: ScheduleKind,
    params: ScheduleParams,
    total_time: f64,
}

impl Schedule {
    fn build(kind: ScheduleKind, params: ScheduleParams) -> Result<Self> {
        check_sites(params.l)?;
        check_eta(params.eta)?;
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        let total_time = match kind {
            ScheduleKind::Naive => {
                nonneg("T", params.naive_time)?;
                params.naive_time
            }
            ScheduleKind::Stage1 => {
                nonneg("T1", params.t1)?;
                params.t1
            }
            ScheduleKind::Stage3 => {
                check_tau(params.tau)?;
                nonneg("T3", params.t3)?;
                params.t3
            }
            ScheduleKind::Stage2MovingWell => {
                check_tau(params.tau)?;
                params.l as f64 * params.tau
            }
            ScheduleKind::CompositeThreeStage => {
                check_tau(params.tau)?;
                nonneg("T1", params.t1)?;
                nonneg("T3", params.t3)?;
                params.t1 + params.l as f64 * params.tau + params.t3
            }
        };
        Ok(Schedule { kind, params, total_time })
    }

    /// `H(s) = (1 - s) H_B + s H_P` over total time `T`.
    pub fn naive(l: usize, eta: f64, total_time: f64, ramp: Ramp) -> Result<Self> {
        let params = ScheduleParams { l, eta, tau: 1.0, t1: 0.0, t3: 0.0, naive_time: total_time, ramp };
        Schedule::build(ScheduleKind::Naive, params)
    }

    /// `H_B → H_I(0)` over `t1`.
    pub fn stage1(l: usize, eta: f64, tau: f64, t1: f64, ramp: Ramp) -> Result<Self> {
        check_tau(tau)?;
        let params = ScheduleParams { l, eta, tau, t1, t3: 0.0, naive_time: 0.0, ramp };
        Schedule::build(ScheduleKind::Stage1, params)
    }

    /// `H_I(t)` for `t ∈ [0, Lτ]`.
    pub fn stage2(l: usize, eta: f64, tau: f64) -> Result<Self> {
        let params = ScheduleParams { l, eta, tau, t1: 0.0, t3: 0.0, naive_time: 0.0, ramp: Ramp::Linear };
        Schedule::build(ScheduleKind::Stage2MovingWell, params)
    }

    /// `H_I(Lτ) → H_P` over `t3`.
    pub fn stage3(l: usize, eta: f64, tau: f64, t3: f64, ramp: Ramp) -> Result<Self> {
        let params = ScheduleParams { l, eta, tau, t1: 0.0, t3, naive_time: 0.0, ramp };
        Schedule::build(ScheduleKind::Stage3, params)
    }

    /// Stages 1, 2 and 3 back to back.
    pub fn three_stage(l: usize, eta: f64, tau: f64, t1: f64, t3: f64, ramp: Ramp) -> Result<Self> {
        let params = ScheduleParams { l, eta, tau, t1, t3, naive_time: 0.0, ramp };
        Schedule::build(ScheduleKind::CompositeThreeStage, params)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn params(&self) -> &ScheduleParams {
        &self.params
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn sites(&self) -> usize {
        self.params.l + 1
    }

    /// Stage boundaries `[t_0 = 0, …, t_k = total_time]`. Step sequences
    /// never straddle a boundary.
    pub fn breakpoints(&self) -> Vec<f64> {
        let p = &self.params;
        match self.kind {
            ScheduleKind::CompositeThreeStage => {
                let t2 = p.t1 + p.l as f64 * p.tau;
                let mut points = vec![0.0];
                for t in [p.t1, t2, self.total_time] {
                    if t > *points.last().unwrap() {
                        points.push(t);
                    }
                }
                points
            }
            _ => vec![0.0, self.total_time],
        }
    }

    /// The structure of the schedule at time `t`.
    pub fn stage_at(&self, t: f64) -> Result<StagePoint> {
        if !(0.0..=self.total_time).contains(&t) {
            return Err(Error::TimeOutOfRange { t, total: self.total_time });
        }
        let p = &self.params;
        let lt = p.l as f64 * p.tau;
        let ramp = |t: f64, duration: f64| if duration > 0.0 { p.ramp.value(t / duration) } else { 0.0 };
        Ok(match self.kind {
            ScheduleKind::Naive => {
                StagePoint::Interpolation { from: Endpoint::Beginning, to: Endpoint::Problem, s: ramp(t, p.naive_time) }
            }
            ScheduleKind::Stage1 => {
                StagePoint::Interpolation { from: Endpoint::Beginning, to: Endpoint::MovingWell(0.0), s: ramp(t, p.t1) }
            }
            ScheduleKind::Stage2MovingWell => StagePoint::MovingWell(t),
            ScheduleKind::Stage3 => {
                StagePoint::Interpolation { from: Endpoint::MovingWell(lt), to: Endpoint::Problem, s: ramp(t, p.t3) }
            }
            ScheduleKind::CompositeThreeStage => {
                if t < p.t1 {
                    StagePoint::Interpolation {
                        from: Endpoint::Beginning,
                        to: Endpoint::MovingWell(0.0),
                        s: ramp(t, p.t1),
                    }
                } else if t <= p.t1 + lt {
                    StagePoint::MovingWell(t - p.t1)
                } else {
                    StagePoint::Interpolation {
                        from: Endpoint::MovingWell(lt),
                        to: Endpoint::Problem,
                        s: ramp(t - p.t1 - lt, p.t3),
                    }
                }
            }
        })
    }

    pub fn endpoint(&self, endpoint: Endpoint) -> Result<TridiagonalHamiltonian> {
        let p = &self.params;
        match endpoint {
            Endpoint::Beginning => build_hb_reduced(p.l),
            Endpoint::Problem => build_hp_reduced(p.l, p.eta),
            Endpoint::MovingWell(t) => build_hi_reduced(p.l, p.eta, p.tau, t),
        }
    }

    /// Reduced Hamiltonian at time `t ∈ [0, total_time]`.
    pub fn hamiltonian_at(&self, t: f64) -> Result<TridiagonalHamiltonian> {
        match self.stage_at(t)? {
            StagePoint::MovingWell(tw) => self.endpoint(Endpoint::MovingWell(tw)),
            StagePoint::Interpolation { from, to, s } => {
                let a = self.endpoint(from)?;
                let b = self.endpoint(to)?;
                let mut h = TridiagonalHamiltonian::interpolate(&a, &b, s, "H(t)")?;
                h.eta = Some(self.params.eta);
                Ok(h)
            }
        }
    }

    /// Upper bound on `max_ij |dH_ij/dt|` over the whole schedule.
    pub fn lipschitz_constant(&self) -> Result<f64> {
        let p = &self.params;
        let slope = p.ramp.max_slope();
        let interp = |from: Endpoint, to: Endpoint, duration: f64| -> Result<f64> {
            if duration <= 0.0 {
                return Ok(0.0);
            }
            let a = self.endpoint(from)?;
            let b = self.endpoint(to)?;
            Ok(slope * a.max_abs_diff(&b) / duration)
        };
        // d/dt of (η/2)(1 - e^{-x²}) with x = t/τ - m peaks at |x| = 1/√2
        let well = p.eta / (p.tau * (2.0 * std::f64::consts::E).sqrt());
        let lt = p.l as f64 * p.tau;
        Ok(match self.kind {
            ScheduleKind::Naive => interp(Endpoint::Beginning, Endpoint::Problem, p.naive_time)?,
            ScheduleKind::Stage1 => interp(Endpoint::Beginning, Endpoint::MovingWell(0.0), p.t1)?,
            ScheduleKind::Stage2MovingWell => well,
            ScheduleKind::Stage3 => interp(Endpoint::MovingWell(lt), Endpoint::Problem, p.t3)?,
            ScheduleKind::CompositeThreeStage => well
                .max(interp(Endpoint::Beginning, Endpoint::MovingWell(0.0), p.t1)?)
                .max(interp(Endpoint::MovingWell(lt), Endpoint::Problem, p.t3)?),
        })
    }
}

/// A one-parameter family `x ↦ H(x)` over a closed domain.
pub trait HamiltonianFamily: Sync {
    fn at(&self, x: f64) -> Result<TridiagonalHamiltonian>;
    fn domain(&self) -> (f64, f64);
}

impl HamiltonianFamily for Schedule {
    fn at(&self, x: f64) -> Result<TridiagonalHamiltonian> {
        self.hamiltonian_at(x)
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, self.total_time)
    }
}

/// The three interpolations of the gap analysis, parameterised by `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `(1 - s) H_B + s H_P`.
    Naive,
    /// `(1 - s) H_B + s H_I(0)`.
    Stage1,
    /// `(1 - s) H_I(Lτ) + s H_P`.
    Stage3,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(FamilyKind::Naive),
            "stage1" => Ok(FamilyKind::Stage1),
            "stage3" => Ok(FamilyKind::Stage3),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Interpolation between two fixed endpoints, `s ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct InterpolationFamily {
    kind: FamilyKind,
    from: TridiagonalHamiltonian,
    to: TridiagonalHamiltonian,
}

impl InterpolationFamily {
    /// The endpoints of the stage-1 and stage-3 families do not depend on
    /// `τ`, since `H_I(0)` and `H_I(Lτ)` only see `t/τ`.
    pub fn new(kind: FamilyKind, l: usize, eta: f64) -> Result<Self> {
        let (from, to) = match kind {
            FamilyKind::Naive => (build_hb_reduced(l)?, build_hp_reduced(l, eta)?),
            FamilyKind::Stage1 => (build_hb_reduced(l)?, build_hi_reduced(l, eta, 1.0, 0.0)?),
            FamilyKind::Stage3 => (build_hi_reduced(l, eta, 1.0, l as f64)?, build_hp_reduced(l, eta)?),
        };
        Ok(InterpolationFamily { kind, from, to })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.from.dim()
    }
}

impl HamiltonianFamily for InterpolationFamily {
    fn at(&self, s: f64) -> Result<TridiagonalHamiltonian> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("s = {s} outside [0, 1]")));
        }
        TridiagonalHamiltonian::interpolate(&self.from, &self.to, s, "H(s)")
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}
