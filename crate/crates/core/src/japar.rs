//! Anhysteretic parameter estimation by paramagnet linearization.
//!
//! Given anhysteretic samples `(H, M)`, the estimator
//!
//! 1. takes the initial susceptibility `χa` of the data and the moment `m1`
//!    of the paramagnet with that low-field slope,
//! 2. evaluates that paramagnet at a very large reference field `Ha1`,
//!    giving `χan1 = M_an1/Ha1`,
//! 3. for each scale factor `η` in `[η0, η_max)` solves
//!    `η·χan1 = (Ms/Ha1)·L(3·χparam·Ha1/Ms)` for `χparam`, which fixes the
//!    ferromagnetic moment `m = 3kB·T·χparam/(μ0·Ms)`, the shape parameter
//!    `aJ = kB·T/(μ0·m)` and the coupling `α = 1/χparam − 1/χa`,
//! 4. rebuilds the self-consistent anhysteretic curve on the measured grid
//!    and scores it by the tesla-scaled residual norm.
//!
//! `η*` is the sweep point with the smallest norm. The first-local-minimum
//! mode instead stops at the first point where the norm fails to decrease.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::MU0;
use crate::data::MagnetizationCurve;
use crate::error::{Error, Result};
use crate::langevin::langevin;
use crate::magnetics::{
    alpha_from_susceptibilities, anhysteretic_implicit, moment_from_susceptibility,
    shape_param_from_moment, AnhystereticParams, MaterialSpec,
};
use crate::root::{expand_bracket_log, find_root, RootConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Evaluate the whole sweep and return the global minimum.
    #[default]
    FullArgmin,
    /// Stop as soon as the residual norm stops decreasing.
    FirstLocalMin,
}

/// How the initial susceptibility `χa` is read off the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum SusceptibilityRule {
    /// `M/H` at the first sample with `H > 0` and `M > 0`.
    #[default]
    FirstPositive,
    /// Least-squares slope through the origin over the first `points`
    /// positive-field samples.
    LeastSquares { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JaParConfig {
    /// Reference field for the high-field paramagnet, A/m.
    pub ha1: f64,
    pub eta0: f64,
    /// Sweep increment of `η`.
    pub eps: f64,
    /// Exclusive upper end of the sweep.
    pub eta_max: f64,
    pub sweep_mode: SweepMode,
    pub susceptibility: SusceptibilityRule,
    /// Coarse-to-fine stride in units of `eps` (full-argmin only). `None`
    /// or `Some(1)` evaluates every point.
    pub coarse_stride: Option<usize>,
    /// Evaluate full-argmin sweeps on the rayon pool.
    pub parallel: bool,
}

impl Default for JaParConfig {
    fn default() -> Self {
        Self {
            ha1: 1e6,
            eta0: 0.9,
            eps: 1e-5,
            eta_max: 1.0,
            sweep_mode: SweepMode::FullArgmin,
            susceptibility: SusceptibilityRule::FirstPositive,
            coarse_stride: None,
            parallel: true,
        }
    }
}

impl JaParConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ha1 > 0.0 && self.ha1.is_finite()) {
            return Err(Error::InvalidParameter(format!("Ha1 must be > 0, got {}", self.ha1)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(0.0 < self.eta0 && self.eta0 < self.eta_max && self.eta_max <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < eta0 < eta_max <= 1, got eta0 = {}, eta_max = {}",
                self.eta0, self.eta_max
            )));
        }
        if let SusceptibilityRule::LeastSquares { points: 0 } = self.susceptibility {
            return Err(Error::InvalidParameter("least-squares window needs >= 1 point".into()));
        }
        if self.coarse_stride == Some(0) {
            return Err(Error::InvalidParameter("coarse stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of sweep points `η_k = η0 + k·eps` with `η_k < η_max`.
    pub fn sweep_len(&self) -> usize {
        let mut n = ((self.eta_max - self.eta0) / self.eps).ceil() as usize;
        while n > 0 && self.eta_at(n - 1) >= self.eta_max {
            n -= 1;
        }
        while self.eta_at(n) < self.eta_max {
            n += 1;
        }
        n
    }

    /// The `k`-th sweep point. Computed by multiplication so that every
    /// evaluation order produces the same bits.
    #[inline]
    pub fn eta_at(&self, k: usize) -> f64 {
        self.eta0 + k as f64 * self.eps
    }
}

/// Conditions worth surfacing alongside a successful fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum FitWarning {
    /// `α < 0`: the data is less coupled than its paramagnet equivalent.
    NonPhysicalAlpha { alpha: f64 },
    /// `η*` sits on the first or last sweep point; the minimum may lie outside.
    EtaAtSweepBoundary { eta: f64 },
    /// The residual profile has more than one basin.
    NonUnimodalProfile,
    /// Some sweep points produced no parameters and were skipped.
    FailedEtaPoints { count: usize },
}

impl FitWarning {
    pub fn code(&self) -> &'static str {
        match self {
            FitWarning::NonPhysicalAlpha { .. } => "non_physical_alpha",
            FitWarning::EtaAtSweepBoundary { .. } => "eta_at_sweep_boundary",
            FitWarning::NonUnimodalProfile => "non_unimodal_profile",
            FitWarning::FailedEtaPoints { .. } => "failed_eta_points",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub eta_star: f64,
    pub chi_param: f64,
    /// Ferromagnetic pseudo-domain moment, A·m².
    pub moment: f64,
    /// Shape parameter, A/m.
    pub a_j: f64,
    pub alpha: f64,
    /// `μ0·(M̂ − M)` per sample, tesla.
    pub residual: Vec<f64>,
    /// Euclidean norm of `residual`, tesla.
    pub residual_norm: f64,
    /// Initial anhysteretic susceptibility of the data.
    pub chi_an_a: f64,
    /// Moment of the low-field paramagnet equivalent, A·m².
    pub m1: f64,
    /// Shape parameter of the low-field paramagnet equivalent, A/m.
    pub a1: f64,
    pub m_an1: f64,
    pub chi_an1: f64,
    /// Number of `η` values evaluated.
    pub iterations: usize,
    pub sweep_mode: SweepMode,
    /// Unimodality of the evaluated residual profile (full-argmin only).
    pub profile_unimodal: Option<bool>,
    pub warnings: Vec<FitWarning>,
}

impl FitReport {
    pub fn params(&self) -> AnhystereticParams {
        AnhystereticParams {
            a_j: self.a_j,
            alpha: self.alpha,
            moment: self.moment,
        }
    }
}

/// Initial anhysteretic susceptibility of the data.
pub fn initial_susceptibility(data: &MagnetizationCurve, rule: SusceptibilityRule) -> Result<f64> {
    let mut positive = data.samples.iter().filter(|s| s.h > 0.0 && s.m > 0.0);
    match rule {
        SusceptibilityRule::FirstPositive => positive
            .next()
            .map(|s| s.m / s.h)
            .ok_or(Error::NoPositiveSample),
        SusceptibilityRule::LeastSquares { points } => {
            let (hm, hh, n) = positive
                .take(points)
                .fold((0.0, 0.0, 0usize), |(hm, hh, n), s| (hm + s.h * s.m, hh + s.h * s.h, n + 1));
            if n == 0 {
                return Err(Error::NoPositiveSample);
            }
            Ok(hm / hh)
        }
    }
}

/// High-field point of the paramagnet with moment `m1`: `(M_an1, χan1)`.
pub fn paramagnet_reference(m1: f64, ms: f64, temperature: f64, ha1: f64) -> (f64, f64) {
    let a1 = shape_param_from_moment(m1, temperature);
    let m_an1 = ms * langevin(ha1 / a1);
    (m_an1, m_an1 / ha1)
}

/// Solve `η·χan1 − (Ms/Ha1)·L(3·χparam·Ha1/Ms) = 0` for `χparam > 0`.
///
/// With `y = η·χan1·Ha1/Ms` and `z = 3·χparam·Ha1/Ms` the equation is
/// `L(z) = y`, and `1 − 1/z < L(z) < z/3` pins the root to
/// `3y ≤ z ≤ 1/(1 − y)`.
pub fn solve_chi_param(eta: f64, chi_an1: f64, ha1: f64, ms: f64) -> Result<f64> {
    let target = eta * chi_an1;
    let y = target * ha1 / ms;
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::NoSolution(format!(
            "eta*chi_an1*Ha1/Ms = {y} is outside (0, 1)"
        )));
    }
    let scale = ms / (3.0 * ha1);
    let g = |chi: f64| target - ms / ha1 * langevin(chi / scale);

    let lo = 3.0 * y * scale * (1.0 - 1e-12);
    let hi = scale / (1.0 - y) * (1.0 + 1e-12);
    let (g_lo, g_hi) = (g(lo), g(hi));
    let bracket = if g_lo >= 0.0 && g_hi <= 0.0 {
        (lo, hi)
    } else {
        expand_bracket_log(g, 0.5 * (lo + hi), 2.0)
            .map_err(|e| Error::NoSolution(format!("bracket search failed: {e}")))?
    };
    let cfg = RootConfig {
        abs_tol: f64::MIN_POSITIVE,
        rel_tol: 2.0 * f64::EPSILON,
        max_iter: 200,
        bracket: Some(bracket),
    };
    let root = find_root(g, &cfg)?;
    Ok(root.x)
}

/// Self-consistent anhysteretic magnetization at each field.
pub fn reconstruct_curve(params: &AnhystereticParams, ms: f64, fields: &[f64]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|&h| anhysteretic_implicit(h, params, ms))
        .collect()
}

/// `μ0·(M̂ − M)` componentwise, and its Euclidean norm.
pub fn residual(data: &[f64], reconstruction: &[f64]) -> Result<(Vec<f64>, f64)> {
    if data.len() != reconstruction.len() {
        return Err(Error::LengthMismatch {
            expected: data.len(),
            found: reconstruction.len(),
        });
    }
    let r: Vec<f64> = reconstruction
        .iter()
        .zip(data)
        .map(|(fit, meas)| MU0 * (fit - meas))
        .collect();
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((r, norm))
}

/// One point of the `η` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub eta: f64,
    /// `NaN` when the point failed.
    pub chi_param: f64,
    /// `+∞` when the point failed.
    pub residual_norm: f64,
}

/// Data-derived quantities shared by every sweep point.
struct Sweep<'a> {
    fields: Vec<f64>,
    measured: Vec<f64>,
    material: &'a MaterialSpec,
    cfg: &'a JaParConfig,
    chi_an_a: f64,
    m1: f64,
    a1: f64,
    m_an1: f64,
    chi_an1: f64,
}

struct EtaEval {
    chi_param: f64,
    norm: f64,
}

impl<'a> Sweep<'a> {
    fn prepare(data: &MagnetizationCurve, material: &'a MaterialSpec, cfg: &'a JaParConfig) -> Result<Self> {
        cfg.validate()?;
        MaterialSpec::new(material.ms, material.temperature)?;
        if data.len() < 3 {
            return Err(Error::InsufficientSamples {
                what: "anhysteretic data",
                needed: 3,
                found: data.len(),
            });
        }
        data.validate(None)?;
        if let Some(i) = data.samples.windows(2).position(|w| !(w[1].h > w[0].h)) {
            return Err(Error::InvalidCurve(format!(
                "anhysteretic data needs strictly increasing H (samples {i} and {})",
                i + 1
            )));
        }
        let chi_an_a = initial_susceptibility(data, cfg.susceptibility)?;
        let t = material.temperature;
        let m1 = moment_from_susceptibility(chi_an_a, material.ms, t);
        let a1 = shape_param_from_moment(m1, t);
        let (m_an1, chi_an1) = paramagnet_reference(m1, material.ms, t, cfg.ha1);
        Ok(Self {
            fields: data.fields(),
            measured: data.magnetizations(),
            material,
            cfg,
            chi_an_a,
            m1,
            a1,
            m_an1,
            chi_an1,
        })
    }

    fn params_at(&self, eta: f64) -> Result<(f64, AnhystereticParams)> {
        let ms = self.material.ms;
        let chi_param = solve_chi_param(eta, self.chi_an1, self.cfg.ha1, ms)?;
        let moment = moment_from_susceptibility(chi_param, ms, self.material.temperature);
        let alpha = alpha_from_susceptibilities(chi_param, self.chi_an_a);
        let params = AnhystereticParams::from_moment(moment, alpha, self.material.temperature)?;
        Ok((chi_param, params))
    }

    fn evaluate(&self, k: usize) -> Result<EtaEval> {
        let (chi_param, params) = self.params_at(self.cfg.eta_at(k))?;
        let recon = reconstruct_curve(&params, self.material.ms, &self.fields)?;
        let (_, norm) = residual(&self.measured, &recon)?;
        Ok(EtaEval { chi_param, norm })
    }

    fn norms(&self, ks: &[usize]) -> Vec<Result<EtaEval>> {
        if self.cfg.parallel {
            ks.par_iter().map(|&k| self.evaluate(k)).collect()
        } else {
            ks.iter().map(|&k| self.evaluate(k)).collect()
        }
    }

    fn first_point(&self, results: &[(usize, Result<EtaEval>)]) -> Result<()> {
        if let Some((0, Err(e))) = results.first().map(|(k, r)| (*k, r.as_ref())) {
            return Err(Error::DegenerateSweep {
                eta: self.cfg.eta0,
                reason: e.to_string(),
            });
        }
        Ok(())
    }
}

/// Lowest finite norm; ties go to the smallest index.
fn argmin(results: &[(usize, Result<EtaEval>)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, r) in results {
        if let Ok(ev) = r {
            if ev.norm.is_finite() && best.is_none_or(|(_, n)| ev.norm < n) {
                best = Some((*k, ev.norm));
            }
        }
    }
    best.map(|(k, _)| k)
}

/// Whether a residual profile decreases to a single minimum and then
/// increases, allowing wiggles of `1e-9` of its largest value (the level of
/// the self-consistent solve tolerance). Any non-finite entry fails.
pub fn is_unimodal(norms: &[f64]) -> bool {
    if norms.is_empty() || norms.iter().any(|n| !n.is_finite()) {
        return false;
    }
    let max = norms.iter().cloned().fold(f64::MIN, f64::max);
    let tol = 1e-9 * max.abs() + 1e-300;
    let (i_min, _) = norms
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &n)| if n < acc.1 { (i, n) } else { acc });
    let descending = norms[..=i_min].windows(2).all(|w| w[1] <= w[0] + tol);
    let ascending = norms[i_min..].windows(2).all(|w| w[1] >= w[0] - tol);
    descending && ascending
}

/// Residual norm at every point of the configured sweep.
pub fn residual_profile(
    data: &MagnetizationCurve,
    material: &MaterialSpec,
    cfg: &JaParConfig,
) -> Result<Vec<ProfilePoint>> {
    let sweep = Sweep::prepare(data, material, cfg)?;
    let ks: Vec<usize> = (0..cfg.sweep_len()).collect();
    let results = sweep.norms(&ks);
    Ok(ks
        .iter()
        .zip(results)
        .map(|(&k, r)| match r {
            Ok(ev) => ProfilePoint {
                eta: cfg.eta_at(k),
                chi_param: ev.chi_param,
                residual_norm: ev.norm,
            },
            Err(_) => ProfilePoint {
                eta: cfg.eta_at(k),
                chi_param: f64::NAN,
                residual_norm: f64::INFINITY,
            },
        })
        .collect())
}

/// Run the full estimator on anhysteretic data.
pub fn fit(data: &MagnetizationCurve, material: &MaterialSpec, cfg: &JaParConfig) -> Result<FitReport> {
    let sweep = Sweep::prepare(data, material, cfg)?;
    let n = cfg.sweep_len();
    let mut warnings = Vec::new();

    let (k_star, iterations, profile_unimodal, failed) = match cfg.sweep_mode {
        SweepMode::FullArgmin => {
            let stride = cfg.coarse_stride.unwrap_or(1);
            let coarse: Vec<usize> = if stride > 1 {
                let mut ks: Vec<usize> = (0..n).step_by(stride).collect();
                if ks.last() != Some(&(n - 1)) {
                    ks.push(n - 1);
                }
                ks
            } else {
                (0..n).collect()
            };
            let coarse_results: Vec<_> = coarse.iter().copied().zip(sweep.norms(&coarse)).collect();
            sweep.first_point(&coarse_results)?;
            let coarse_norms: Vec<f64> = coarse_results
                .iter()
                .map(|(_, r)| r.as_ref().map_or(f64::INFINITY, |e| e.norm))
                .collect();
            let unimodal = is_unimodal(&coarse_norms);
            let mut failed = coarse_norms.iter().filter(|v| !v.is_finite()).count();
            let mut evaluated = coarse.len();
            let k_coarse = argmin(&coarse_results).ok_or_else(|| Error::DegenerateSweep {
                eta: cfg.eta0,
                reason: "no sweep point produced a finite residual".into(),
            })?;
            let k_star = if stride > 1 {
                let lo = k_coarse.saturating_sub(stride);
                let hi = (k_coarse + stride).min(n - 1);
                let fine: Vec<usize> = (lo..=hi).collect();
                let fine_results: Vec<_> = fine.iter().copied().zip(sweep.norms(&fine)).collect();
                failed += fine_results.iter().filter(|(_, r)| r.is_err()).count();
                evaluated += fine.len();
                argmin(&fine_results).unwrap_or(k_coarse)
            } else {
                k_coarse
            };
            (k_star, evaluated, Some(unimodal), failed)
        }
        SweepMode::FirstLocalMin => {
            let mut prev: Option<f64> = None;
            let mut k_star = 0;
            let mut evaluated = 0;
            for k in 0..n {
                evaluated += 1;
                let norm = match sweep.evaluate(k) {
                    Ok(ev) => ev.norm,
                    Err(e) if k == 0 => {
                        return Err(Error::DegenerateSweep {
                            eta: cfg.eta0,
                            reason: e.to_string(),
                        })
                    }
                    Err(_) => f64::INFINITY,
                };
                match prev {
                    Some(p) if !(norm < p) => break,
                    _ => {
                        k_star = k;
                        prev = Some(norm);
                    }
                }
            }
            (k_star, evaluated, None, 0)
        }
    };

    let (chi_param, params) = sweep.params_at(cfg.eta_at(k_star))?;
    let recon = reconstruct_curve(&params, material.ms, &sweep.fields)?;
    let (residual, residual_norm) = residual(&sweep.measured, &recon)?;

    if params.alpha < 0.0 {
        warnings.push(FitWarning::NonPhysicalAlpha { alpha: params.alpha });
    }
    if k_star == 0 || k_star + 1 == n {
        warnings.push(FitWarning::EtaAtSweepBoundary { eta: cfg.eta_at(k_star) });
    }
    if profile_unimodal == Some(false) {
        warnings.push(FitWarning::NonUnimodalProfile);
    }
    if failed > 0 {
        warnings.push(FitWarning::FailedEtaPoints { count: failed });
    }

    Ok(FitReport {
        eta_star: cfg.eta_at(k_star),
        chi_param,
        moment: params.moment,
        a_j: params.a_j,
        alpha: params.alpha,
        residual,
        residual_norm,
        chi_an_a: sweep.chi_an_a,
        m1: sweep.m1,
        a1: sweep.a1,
        m_an1: sweep.m_an1,
        chi_an1: sweep.chi_an1,
        iterations,
        sweep_mode: cfg.sweep_mode,
        profile_unimodal,
        warnings,
    })
}
