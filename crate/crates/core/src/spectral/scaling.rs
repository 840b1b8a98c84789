//! Log-linear fits of the naive minimum gap against chain length.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gap::min_gap;
use super::secular::{crossing_point, secular_roots};
use crate::reduced::{FamilyKind, InterpolationFamily};
use crate::{Error, Result};

/// Gaps below this are treated as underflow.
pub const GAP_FLOOR: f64 = 1e-300;

/// How the naive minimum gap is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapRoute {
    /// Golden-section search over the eigensolver gap.
    #[default]
    Eigensolver,
    /// Closed form at the crossing point via the secular equation.
    Secular,
}

impl std::str::FromStr for GapRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigensolver" => Ok(GapRoute::Eigensolver),
            "secular" => Ok(GapRoute::Secular),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub eta: f64,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub gap: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation from the fit in `ln` units.
    pub residual: f64,
}

impl ScalingFit {
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}

/// Minimum gap of the naive path for a chain of `L` gates.
pub fn naive_min_gap(l: usize, eta: f64, route: GapRoute) -> Result<f64> {
    let gap = match route {
        GapRoute::Eigensolver => {
            let family = InterpolationFamily::new(FamilyKind::Naive, l, eta)?;
            min_gap(&family, 0.0, 1.0)?.gap
        }
        GapRoute::Secular => crossing_point(eta) * secular_roots(eta, l + 1)?.gap,
    };
    if !(gap >= GAP_FLOOR) {
        return Err(Error::GapUnderflow { l, gap });
    }
    Ok(gap)
}

/// Least squares `y ≈ slope·x + intercept`, with the max absolute residual.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).abs()).fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Fit `ln(gap_min)` against `L`; the slope should approach `-ln η`.
pub fn gap_scaling_fit(eta: f64, l_values: &[usize], route: GapRoute) -> Result<ScalingFit> {
    let mut ls = l_values.to_vec();
    ls.sort_unstable();
    ls.dedup();
    if ls.len() < 4 {
        return Err(Error::InvalidParameter("scaling fit needs at least 4 distinct L values".into()));
    }
    let gap: Vec<f64> = ls.par_iter().map(|&l| naive_min_gap(l, eta, route)).collect::<Result<_>>()?;
    let x: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
    let y: Vec<f64> = gap.iter().map(|g| g.ln()).collect();
    let (slope, intercept, residual) = fit_line(&x, &y);
    Ok(ScalingFit { eta, l: ls, gap, slope, intercept, residual })
}
