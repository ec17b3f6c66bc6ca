//! Measurable loop quantities: initial susceptibilities, coercivity,
//! remanence, loop tip and the differential susceptibilities at those points.

use serde::{Deserialize, Serialize};

use crate::data::{MagnetizationCurve, Sample};
use crate::error::{Error, Result};
use crate::hysteresis::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LoopFeatures {
    /// Initial differential susceptibility of the first magnetization curve.
    pub chi_in: f64,
    /// Initial differential susceptibility of the anhysteretic curve.
    pub chi_an: f64,
    /// Differential susceptibility at the coercive point.
    pub chi_max: f64,
    /// Differential susceptibility at remanence.
    pub chi_r: f64,
    /// Differential susceptibility at the loop tip.
    pub chi_m: f64,
    /// Coercive field, A/m.
    pub hc: f64,
    /// Remanent magnetization, A/m.
    pub mr: f64,
    /// Tip magnetization, A/m.
    pub mm: f64,
    /// Tip field, A/m.
    pub hm: f64,
}

impl LoopFeatures {
    /// Check the ordering and sign constraints an estimator relies on.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.chi_in, self.chi_an, self.chi_max, self.chi_r, self.chi_m, self.hc, self.mr,
            self.mm, self.hm,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("loop features must be finite".into()));
        }
        for (name, v) in [
            ("chi_in", self.chi_in),
            ("chi_an", self.chi_an),
            ("chi_max", self.chi_max),
            ("chi_r", self.chi_r),
            ("chi_m", self.chi_m),
            ("Hc", self.hc),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.mr.abs() > self.mm.abs() {
            return Err(Error::InvalidParameter("|Mr| exceeds |Mm|".into()));
        }
        if !(self.hm > self.hc) {
            return Err(Error::InvalidParameter("Hm must exceed Hc".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Samples used for the least-squares slope at the origin.
    pub origin_window: usize,
    /// Minimum samples per loop branch.
    pub min_branch_samples: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            origin_window: 5,
            min_branch_samples: 10,
        }
    }
}

/// Split a sample sequence into maximal runs of constant field direction.
/// The turning sample is shared by the two runs it joins; samples with no
/// field change are dropped.
pub fn split_branches(samples: &[Sample]) -> Vec<(Direction, Vec<Sample>)> {
    let mut out: Vec<(Direction, Vec<Sample>)> = Vec::new();
    let mut prev: Option<Sample> = None;
    for &s in samples {
        let Some(p) = prev else {
            prev = Some(s);
            continue;
        };
        let Some(dir) = Direction::of(s.h - p.h) else {
            continue;
        };
        match out.last_mut() {
            Some((d, run)) if *d == dir => run.push(s),
            _ => out.push((dir, vec![p, s])),
        }
        prev = Some(s);
    }
    out
}

/// Field at which `M` first changes sign along `samples`, by linear
/// interpolation between the bracketing pair.
pub fn zero_crossing(samples: &[Sample]) -> Option<f64> {
    if let Some(s) = samples.first().filter(|s| s.m == 0.0) {
        return Some(s.h);
    }
    samples.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if b.m == 0.0 {
            Some(b.h)
        } else if (a.m < 0.0) != (b.m < 0.0) {
            Some(a.h + (b.h - a.h) * a.m / (a.m - b.m))
        } else {
            None
        }
    })
}

/// Linear interpolation on samples sorted by increasing `h`.
fn interpolate(sorted: &[Sample], h: f64) -> Option<f64> {
    let (first, last) = (sorted.first()?, sorted.last()?);
    if h < first.h || h > last.h {
        return None;
    }
    let i = sorted.partition_point(|s| s.h <= h).clamp(1, sorted.len() - 1);
    let (a, b) = (sorted[i - 1], sorted[i]);
    if b.h == a.h {
        return Some(a.m);
    }
    Some(a.m + (b.m - a.m) * (h - a.h) / (b.h - a.h))
}

/// Central difference of the interpolated branch at `h`, with the local grid
/// spacing as step; one-sided at the branch ends.
fn branch_slope(sorted: &[Sample], h: f64) -> Option<f64> {
    let (first, last) = (sorted.first()?, sorted.last()?);
    let i = sorted.partition_point(|s| s.h <= h).clamp(1, sorted.len() - 1);
    let step = sorted[i].h - sorted[i - 1].h;
    if !(step > 0.0) {
        return None;
    }
    let lo = (h - step).max(first.h);
    let hi = (h + step).min(last.h);
    Some((interpolate(sorted, hi)? - interpolate(sorted, lo)?) / (hi - lo))
}

/// Ordinary least-squares slope over the first `window` samples with `H ≥ 0`.
fn origin_slope(curve: &MagnetizationCurve, window: usize, what: &'static str) -> Result<f64> {
    let pts: Vec<Sample> = curve
        .samples
        .iter()
        .filter(|s| s.h >= 0.0)
        .take(window)
        .copied()
        .collect();
    if pts.len() < window.max(2) {
        return Err(Error::InsufficientSamples {
            what,
            needed: window.max(2),
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mean_h = pts.iter().map(|s| s.h).sum::<f64>() / n;
    let mean_m = pts.iter().map(|s| s.m).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|s| (s.h - mean_h) * (s.m - mean_m)).sum();
    let sxx: f64 = pts.iter().map(|s| (s.h - mean_h).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidCurve(format!("{what} has no field spread at the origin")));
    }
    Ok(sxy / sxx)
}

fn sorted_by_field(branch: &[Sample]) -> Vec<Sample> {
    let mut v = branch.to_vec();
    v.sort_by(|a, b| a.h.total_cmp(&b.h));
    v
}

/// Extract the loop features from a first-magnetization curve, a loop that
/// contains at least one descending and one ascending branch, and an
/// anhysteretic curve. The last branch of each direction is used.
pub fn extract_features(
    first_mag: &MagnetizationCurve,
    loop_curve: &MagnetizationCurve,
    anhysteretic: &MagnetizationCurve,
    opts: &FeatureOptions,
) -> Result<LoopFeatures> {
    let branches = split_branches(&loop_curve.samples);
    let last_of = |dir: Direction| {
        branches
            .iter()
            .rev()
            .find(|(d, _)| *d == dir)
            .map(|(_, b)| b.as_slice())
    };
    let descending = last_of(Direction::Descending).ok_or(Error::MissingBranch("descending"))?;
    let ascending = last_of(Direction::Ascending).ok_or(Error::MissingBranch("ascending"))?;
    for (what, b) in [("descending branch", descending), ("ascending branch", ascending)] {
        if b.len() < opts.min_branch_samples {
            return Err(Error::InsufficientSamples {
                what,
                needed: opts.min_branch_samples,
                found: b.len(),
            });
        }
    }

    let chi_in = origin_slope(first_mag, opts.origin_window, "first magnetization curve")?;
    let chi_an = origin_slope(anhysteretic, opts.origin_window, "anhysteretic curve")?;

    let tip = descending[0];
    let h_cross = zero_crossing(descending).ok_or_else(|| {
        Error::InvalidCurve("descending branch never crosses M = 0".into())
    })?;
    let desc_sorted = sorted_by_field(descending);
    let mr = interpolate(&desc_sorted, 0.0).ok_or_else(|| {
        Error::InvalidCurve("descending branch does not span H = 0".into())
    })?;
    let chi_max = branch_slope(&desc_sorted, h_cross)
        .ok_or_else(|| Error::InvalidCurve("cannot differentiate at coercivity".into()))?;
    let chi_r = branch_slope(&desc_sorted, 0.0)
        .ok_or_else(|| Error::InvalidCurve("cannot differentiate at remanence".into()))?;
    // approach to the tip along the ascending branch
    let n = ascending.len();
    let (a, b) = (ascending[n - 2], ascending[n - 1]);
    let chi_m = (b.m - a.m) / (b.h - a.h);

    Ok(LoopFeatures {
        chi_in,
        chi_an,
        chi_max,
        chi_r,
        chi_m,
        hc: h_cross.abs(),
        mr,
        mm: tip.m,
        hm: tip.h,
    })
}
