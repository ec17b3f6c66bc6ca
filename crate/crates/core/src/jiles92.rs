//! Classical iterative estimator for the full JA parameter set from loop
//! features: `c` from the initial susceptibility ratio, `k` from the coercive
//! point, `α` from remanence and `aJ` from the loop tip, repeated until a
//! re-simulated loop matches the measurement.
//!
//! Langevin arguments at the three loop points follow the effective field
//! there: `Hc/aJ` at coercivity (`M = 0`), `α·Mr/aJ` at remanence (`H = 0`)
//! and `(Hm + α·Mm)/aJ` at the tip.

use serde::{Deserialize, Serialize};

use crate::constants::MU0;
use crate::data::MagnetizationCurve;
use crate::error::{Error, Result, RootError};
use crate::features::LoopFeatures;
use crate::hysteresis::{integrate_path, HysteresisParams, SimOptions};
use crate::langevin::{langevin, langevin_prime};
use crate::magnetics::{slope_through, MaterialSpec};
use crate::root::{expand_bracket_log, find_root, RootConfig, MAX_EXPANSIONS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jiles92Config {
    /// First `α` seed.
    pub alpha_seed: f64,
    /// Seeds tried in order after `alpha_seed` fails the fit condition.
    pub restart_seeds: Vec<f64>,
    pub max_outer_iter: usize,
    /// Mean squared `μ0·ΔM` between simulated and measured loop, T².
    pub fit_tol: f64,
    /// RK4 steps between consecutive measured fields.
    pub substeps: usize,
    pub sim: SimOptions,
}

impl Default for Jiles92Config {
    fn default() -> Self {
        Self {
            alpha_seed: 1e-4,
            restart_seeds: vec![1e-3, 1e-2, 1e-1],
            max_outer_iter: 50,
            fit_tol: 1e-3,
            substeps: 4,
            sim: SimOptions::default(),
        }
    }
}

impl Jiles92Config {
    pub fn validate(&self) -> Result<()> {
        for &s in std::iter::once(&self.alpha_seed).chain(&self.restart_seeds) {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("alpha seeds must be > 0, got {s}")));
            }
        }
        if !(self.fit_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("fit_tol must be > 0, got {}", self.fit_tol)));
        }
        if self.max_outer_iter == 0 || self.substeps == 0 {
            return Err(Error::InvalidParameter(
                "max_outer_iter and substeps must be >= 1".into(),
            ));
        }
        Ok(())
    }

    fn seeds(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.alpha_seed).chain(self.restart_seeds.iter().copied())
    }
}

/// Outcome of one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: f64,
    pub iterations: usize,
    /// Lowest MSE reached, T²; `None` if no iteration produced a usable set.
    pub best_mse: Option<f64>,
    /// Why the seed stopped early, if it did.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jiles92Report {
    /// Best parameter set over all seeds and iterations.
    pub params: HysteresisParams,
    /// Its loop MSE, T².
    pub mse: f64,
    pub fit_condition_met: bool,
    pub seed: f64,
    pub iterations: usize,
    pub seeds: Vec<SeedOutcome>,
    pub warnings: Vec<String>,
}

/// `c = χ'in/χ'an`.
pub fn c_from_susceptibilities(chi_in: f64, chi_an: f64) -> Result<f64> {
    if chi_an == 0.0 {
        return Err(Error::ZeroDenominator("c = chi_in / chi_an"));
    }
    Ok(chi_in / chi_an)
}

/// `aJ = (Ms/3)·(1/χ'an + α)`.
pub fn aj_initial(ms: f64, chi_an: f64, alpha: f64) -> f64 {
    ms / 3.0 * (1.0 / chi_an + alpha)
}

/// Pinning from the coercive-point balance.
pub fn k_from_coercive(features: &LoopFeatures, c: f64, a_j: f64, alpha: f64, ms: f64) -> Result<f64> {
    if c == 1.0 {
        return Err(Error::DegenerateC);
    }
    let one_minus_c = 1.0 - c;
    let m_an = ms * langevin(features.hc / a_j);
    let slope = slope_through(features.hc, 0.0, a_j, alpha, ms)?;
    let denominator = features.chi_max / one_minus_c - c / one_minus_c * slope;
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::SingularDenominator {
            h: features.hc,
            m: 0.0,
            step: None,
        });
    }
    Ok(m_an / one_minus_c * (alpha + 1.0 / denominator))
}

/// Residual of the remanence equation
/// `Mr = M_an(Mr) + k/(α/(1−c) + 1/(χ'r − c·dM_an/dH))`, evaluated at `H = 0`.
///
/// Where the anhysteretic slope through `(0, Mr)` is singular it is taken as
/// `+∞`, its limit from the single-valued side, so the residual stays
/// continuous in `α`.
pub fn remanence_residual(features: &LoopFeatures, c: f64, k: f64, a_j: f64, alpha: f64, ms: f64) -> f64 {
    let mr = features.mr;
    let x = alpha * mr / a_j;
    let m_an = ms * langevin(x);
    let reversible = if c == 0.0 {
        0.0
    } else {
        let g = ms / a_j * langevin_prime(x);
        let den = 1.0 - alpha * g;
        c * if den > 0.0 { g / den } else { f64::INFINITY }
    };
    let denominator = alpha / (1.0 - c) + 1.0 / (features.chi_r - reversible);
    m_an + k / denominator - mr
}

/// Solve the remanence equation for `α`, searching outward from
/// `alpha_guess`.
pub fn alpha_update(
    features: &LoopFeatures,
    c: f64,
    k: f64,
    a_j: f64,
    ms: f64,
    alpha_guess: f64,
) -> Result<f64> {
    if c == 1.0 {
        return Err(Error::SingularDenominator {
            h: 0.0,
            m: features.mr,
            step: None,
        });
    }
    // α·Ms/aJ spans twelve decades either side of unit coupling
    let unit = a_j / ms;
    let (lo_lim, hi_lim) = (unit * 1e-12, unit * 1e12);
    let guess = alpha_guess.clamp(lo_lim, hi_lim);
    let f = |alpha: f64| remanence_residual(features, c, k, a_j, alpha, ms);
    let bracket = bounded_log_bracket(f, guess, lo_lim, hi_lim)?;
    let cfg = RootConfig::bracketed(bracket.0, bracket.1).with_tolerances(lo_lim, 1e-12);
    Ok(find_root(f, &cfg)?.x)
}

/// Residual of the tip equation `Mm = M_an(Hm) − (1−c)·k·χ'm/(α·χ'm + 1)`.
pub fn tip_residual(features: &LoopFeatures, c: f64, k: f64, a_j: f64, alpha: f64, ms: f64) -> f64 {
    let m_an = ms * langevin((features.hm + alpha * features.mm) / a_j);
    m_an - (1.0 - c) * k * features.chi_m / (alpha * features.chi_m + 1.0) - features.mm
}

/// Solve the tip equation for `aJ` starting from `aj_guess`.
pub fn aj_update(features: &LoopFeatures, c: f64, k: f64, alpha: f64, ms: f64, aj_guess: f64) -> Result<f64> {
    let f = |a_j: f64| tip_residual(features, c, k, a_j, alpha, ms);
    let bracket = expand_bracket_log(f, aj_guess, 2.0)?;
    let cfg = RootConfig::bracketed(bracket.0, bracket.1).with_tolerances(1e-12 * aj_guess, 1e-12);
    Ok(find_root(f, &cfg)?.x)
}

/// Multiplicative bracket search around `x0` confined to `[lo_lim, hi_lim]`.
/// Non-finite values of `f` count as "no sign information".
fn bounded_log_bracket<F>(mut f: F, x0: f64, lo_lim: f64, hi_lim: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    const GROW: f64 = 1.5;
    let mut lo = (x0 / GROW).max(lo_lim);
    let mut hi = (x0 * GROW).min(hi_lim);
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    for _ in 0..4 * MAX_EXPANSIONS {
        if f_lo.is_finite() && f_hi.is_finite() && (f_lo == 0.0 || f_hi == 0.0 || (f_lo < 0.0) != (f_hi < 0.0)) {
            return Ok((lo, hi));
        }
        let can_lo = lo > lo_lim;
        let can_hi = hi < hi_lim;
        let widen_lo = match (can_lo, can_hi) {
            (false, false) => break,
            (true, false) => true,
            (false, true) => false,
            _ => !f_lo.is_finite() || (f_hi.is_finite() && f_lo.abs() < f_hi.abs()),
        };
        if widen_lo {
            lo = (lo / GROW).max(lo_lim);
            f_lo = f(lo);
        } else {
            hi = (hi * GROW).min(hi_lim);
            f_hi = f(hi);
        }
    }
    Err(RootError::NoSignChange {
        expansions: 4 * MAX_EXPANSIONS,
    }
    .into())
}

/// Mean squared `μ0·(M_sim − M_meas)` along the measured loop, starting the
/// simulation from the first measured sample.
pub fn loop_mse(
    params: &HysteresisParams,
    measured: &MagnetizationCurve,
    substeps: usize,
    opts: &SimOptions,
) -> Result<f64> {
    let fields = measured.fields();
    let first = measured.samples.first().ok_or(Error::EmptyFile)?;
    let m0 = first.m.clamp(-params.ms, params.ms);
    let sim = integrate_path(params, &fields, m0, substeps, opts)?;
    let sum: f64 = sim
        .iter()
        .zip(&measured.samples)
        .map(|(a, s)| (MU0 * (a - s.m)).powi(2))
        .sum();
    Ok(sum / sim.len() as f64)
}

/// One outer iteration: `k`, then `α`, then `aJ`.
fn iterate_once(
    f: &LoopFeatures,
    c: f64,
    a_j: f64,
    alpha: f64,
    ms: f64,
) -> Result<(f64, f64, f64)> {
    let k = k_from_coercive(f, c, a_j, alpha, ms)?;
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("k = {k} is not positive")));
    }
    let alpha = alpha_update(f, c, k, a_j, ms, alpha)?;
    let a_j = aj_update(f, c, k, alpha, ms, a_j)?;
    if !(a_j > 0.0) {
        return Err(Error::InvalidParameter(format!("aJ = {a_j} is not positive")));
    }
    Ok((a_j, alpha, k))
}

/// Run the estimator against the features and the measured loop they came
/// from. Seeds run in order; the first one meeting the fit condition wins,
/// otherwise the lowest-MSE set over all seeds is returned with
/// `fit_condition_met = false`.
pub fn estimate(
    features: &LoopFeatures,
    material: &MaterialSpec,
    measured_loop: &MagnetizationCurve,
    cfg: &Jiles92Config,
) -> Result<Jiles92Report> {
    cfg.validate()?;
    if measured_loop.len() < 2 {
        return Err(Error::InsufficientSamples {
            what: "measured loop",
            needed: 2,
            found: measured_loop.len(),
        });
    }
    let ms = material.ms;
    let c = c_from_susceptibilities(features.chi_in, features.chi_an)?;
    if c == 1.0 {
        return Err(Error::DegenerateC);
    }
    let mut warnings = Vec::new();
    if !(c > 0.0 && c <= 1.0) {
        warnings.push("c_outside_unit_interval".to_string());
    }

    let mut best: Option<(HysteresisParams, f64, f64, usize)> = None;
    let mut outcomes = Vec::new();
    let mut met = false;

    for seed in cfg.seeds() {
        let mut alpha = seed;
        let mut a_j = aj_initial(ms, features.chi_an, alpha);
        let mut outcome = SeedOutcome {
            seed,
            iterations: 0,
            best_mse: None,
            aborted: None,
        };
        for iter in 1..=cfg.max_outer_iter {
            outcome.iterations = iter;
            let step = iterate_once(features, c, a_j, alpha, ms).and_then(|(a, al, k)| {
                let p = HysteresisParams::new(a, al, c, k, ms)?;
                let mse = loop_mse(&p, measured_loop, cfg.substeps, &cfg.sim)?;
                Ok((p, mse))
            });
            let (p, mse) = match step {
                Ok(v) => v,
                Err(e) => {
                    outcome.aborted = Some(e.to_string());
                    break;
                }
            };
            if outcome.best_mse.is_none_or(|b| mse < b) {
                outcome.best_mse = Some(mse);
            }
            if best.as_ref().is_none_or(|b| mse < b.1) {
                best = Some((p, mse, seed, iter));
            }
            if mse <= cfg.fit_tol {
                met = true;
                break;
            }
            let moved = ((p.a_j - a_j) / a_j).abs().max(((p.alpha - alpha) / alpha).abs());
            a_j = p.a_j;
            alpha = p.alpha;
            if moved < 1e-12 {
                break;
            }
        }
        outcomes.push(outcome);
        if met {
            break;
        }
    }

    let Some((params, mse, seed, iterations)) = best else {
        return Err(Error::NoSolution(
            "every alpha seed aborted before producing a parameter set".into(),
        ));
    };
    if !met {
        warnings.push("fit_condition_not_met".to_string());
    }
    warnings.extend(params.warnings().into_iter().map(str::to_string));
    Ok(Jiles92Report {
        params,
        mse,
        fit_condition_met: met,
        seed,
        iterations,
        seeds: outcomes,
        warnings,
    })
}
