//! Gap scans over one-parameter families and minimum-gap search.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::two_lowest;
use crate::reduced::HamiltonianFamily;
use crate::{Error, Result};

/// Two lowest levels sampled along a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    pub grid: Vec<f64>,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    pub gap: Vec<f64>,
}

impl GapScan {
    /// `(parameter, gap)` at the smallest sampled gap.
    pub fn min_gap(&self) -> (f64, f64) {
        let k = (0..self.gap.len()).min_by(|&a, &b| self.gap[a].total_cmp(&self.gap[b])).unwrap_or(0);
        (self.grid[k], self.gap[k])
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// CSV with header `param,e0,e1,gap`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["param", "e0", "e1", "gap"])?;
        for k in 0..self.len() {
            csv.serialize((self.grid[k], self.e0[k], self.e1[k], self.gap[k]))?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Evaluate the two lowest levels at every grid point (in parallel, order kept).
pub fn gap_scan<F: HamiltonianFamily + ?Sized>(family: &F, grid: &[f64]) -> Result<GapScan> {
    let (lo, hi) = family.domain();
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("scan grid must be sorted".into()));
    }
    if let Some(&bad) = grid.iter().find(|&&x| !(lo..=hi).contains(&x)) {
        return Err(Error::InvalidParameter(format!("grid point {bad} outside [{lo}, {hi}]")));
    }
    let levels: Vec<_> = grid.par_iter().map(|&x| family.at(x).and_then(|h| two_lowest(&h))).collect::<Result<_>>()?;
    Ok(GapScan {
        grid: grid.to_vec(),
        e0: levels.iter().map(|p| p.e0).collect(),
        e1: levels.iter().map(|p| p.e1).collect(),
        gap: levels.iter().map(|p| p.gap).collect(),
    })
}

/// Outcome of [`min_gap`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinGap {
    pub location: f64,
    pub gap: f64,
    /// Whether the minimum sits on an end of the searched bracket.
    pub at_boundary: bool,
}

/// Points on the coarse grid that seeds the golden-section search.
pub const COARSE_POINTS: usize = 129;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn gap_at<F: HamiltonianFamily + ?Sized>(family: &F, x: f64) -> Result<f64> {
    Ok(two_lowest(&family.at(x)?)?.gap)
}

/// Smallest gap over `[lo, hi]`: coarse grid, then golden section.
///
/// The search keeps narrowing past a parameter width of `1e-10` until the two
/// probes agree to `1e-6` relative, because an avoided crossing can be far
/// narrower than that. A minimum on an end of the bracket is reported with
/// `at_boundary` set; [`interior_min_gap`] turns that into an error.
pub fn min_gap<F: HamiltonianFamily + ?Sized>(family: &F, lo: f64, hi: f64) -> Result<MinGap> {
    let (dlo, dhi) = family.domain();
    if !(lo < hi) || lo < dlo || hi > dhi {
        return Err(Error::InvalidParameter(format!("bracket [{lo}, {hi}] invalid for domain [{dlo}, {dhi}]")));
    }
    let scan = gap_scan(family, &uniform_grid(lo, hi, COARSE_POINTS))?;
    let k = (0..scan.len()).min_by(|&a, &b| scan.gap[a].total_cmp(&scan.gap[b])).unwrap();
    let mut best = (scan.grid[k], scan.gap[k]);

    let mut a = scan.grid[k.saturating_sub(1)];
    let mut b = scan.grid[(k + 1).min(scan.len() - 1)];
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = gap_at(family, c)?;
    let mut fd = gap_at(family, d)?;
    for _ in 0..400 {
        for (x, f) in [(c, fc), (d, fd)] {
            if f < best.1 {
                best = (x, f);
            }
        }
        let width = b - a;
        let agree = (fc - fd).abs() <= 1e-6 * fc.min(fd);
        let at_ulp = width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if (width <= 1e-10 && agree) || at_ulp {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = gap_at(family, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = gap_at(family, d)?;
        }
    }
    let tol = 1e-9 * (hi - lo);
    let at_boundary = best.0 - lo <= tol || hi - best.0 <= tol;
    Ok(MinGap { location: best.0, gap: best.1, at_boundary })
}

/// [`min_gap`], but a minimum on the bracket ends is an error.
pub fn interior_min_gap<F: HamiltonianFamily + ?Sized>(family: &F, lo: f64, hi: f64) -> Result<MinGap> {
    let found = min_gap(family, lo, hi)?;
    if found.at_boundary {
        return Err(Error::NoInteriorMinimum { lo, hi });
    }
    Ok(found)
}
