//! Anhysteretic magnetization curves and the moment/susceptibility algebra.
//!
//! The ferromagnetic anhysteretic curve is the self-consistent solution of
//! `M = Ms·L((H + αM)/aJ)`. With `α = 0` it reduces to the explicit
//! paramagnet curve `Ms·L(H/a)`, whose low-field slope `Ms/(3a)` ties a
//! susceptibility to a pseudo-domain moment through `a = kB·T/(μ0·m)`.

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, MU0};
use crate::error::{Error, Result};
use crate::langevin::{langevin, langevin_prime};
use crate::root::{find_root, RootConfig};

/// Absolute tolerance of the self-consistent solve, as a fraction of `Ms`.
pub const IMPLICIT_ABS_TOL: f64 = 1e-9;
pub const IMPLICIT_MAX_ITER: usize = 200;

/// Intrinsic material data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    /// Saturation magnetization, A/m.
    pub ms: f64,
    /// Absolute temperature, K.
    pub temperature: f64,
    /// Curie temperature, K. Carried as metadata only; no model uses it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curie_temperature: Option<f64>,
}

impl MaterialSpec {
    pub fn new(ms: f64, temperature: f64) -> Result<Self> {
        if !(ms > 0.0 && ms.is_finite()) {
            return Err(Error::InvalidParameter(format!("Ms must be > 0, got {ms}")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be > 0 K, got {temperature}"
            )));
        }
        Ok(Self {
            ms,
            temperature,
            curie_temperature: None,
        })
    }

    pub fn with_curie_temperature(mut self, tc: f64) -> Self {
        self.curie_temperature = Some(tc);
        self
    }
}

/// Anhysteretic JA parameters. `a_j` and `moment` are two views of the same
/// quantity, linked by `a_j·moment = kB·T/μ0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnhystereticParams {
    /// Shape parameter, A/m.
    pub a_j: f64,
    /// Interdomain coupling (dimensionless).
    pub alpha: f64,
    /// Pseudo-domain magnetic moment, A·m².
    pub moment: f64,
}

impl AnhystereticParams {
    /// Build from the shape parameter; the moment is derived at `temperature`.
    pub fn from_shape(a_j: f64, alpha: f64, temperature: f64) -> Result<Self> {
        check_positive("aJ", a_j)?;
        check_positive("temperature", temperature)?;
        check_finite("alpha", alpha)?;
        Ok(Self {
            a_j,
            alpha,
            moment: moment_from_shape_param(a_j, temperature),
        })
    }

    /// Build from the pseudo-domain moment; `aJ` is derived at `temperature`.
    pub fn from_moment(moment: f64, alpha: f64, temperature: f64) -> Result<Self> {
        check_positive("moment", moment)?;
        check_positive("temperature", temperature)?;
        check_finite("alpha", alpha)?;
        Ok(Self {
            a_j: shape_param_from_moment(moment, temperature),
            alpha,
            moment,
        })
    }

    /// `α·Ms/(3aJ)`: the low-field feedback gain. The anhysteretic curve is
    /// single valued only while this stays below one.
    pub fn coupling_gain(&self, ms: f64) -> f64 {
        self.alpha * ms / (3.0 * self.a_j)
    }

    pub fn check_stable(&self, ms: f64) -> Result<()> {
        let ratio = self.coupling_gain(ms);
        if ratio >= 1.0 || !ratio.is_finite() {
            return Err(Error::UnstableParams { ratio });
        }
        Ok(())
    }

    /// Negative coupling is allowed numerically but is not physical.
    pub fn is_physical(&self) -> bool {
        self.alpha >= 0.0
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// Paramagnet curve `Ms·L(H/a)`.
#[inline]
pub fn anhysteretic_explicit(h: f64, ms: f64, a: f64) -> f64 {
    ms * langevin(h / a)
}

/// Self-consistent ferromagnetic anhysteretic magnetization at field `h`:
/// the root of `M − Ms·L((H + αM)/aJ)`.
///
/// For `H ≥ 0` the root lies in `[0, Ms]` and is unique while the coupling
/// gain is below one; negative fields are solved by symmetry.
pub fn anhysteretic_implicit(h: f64, params: &AnhystereticParams, ms: f64) -> Result<f64> {
    check_positive("aJ", params.a_j)?;
    check_positive("Ms", ms)?;
    params.check_stable(ms)?;
    implicit_magnetization(h, params.a_j, params.alpha, ms)
}

/// [`anhysteretic_implicit`] on bare parameters; the caller has checked
/// `aJ > 0`, `Ms > 0` and the coupling gain.
pub(crate) fn implicit_magnetization(h: f64, a_j: f64, alpha: f64, ms: f64) -> Result<f64> {
    if !h.is_finite() {
        return Err(Error::InvalidParameter(format!("field must be finite, got {h}")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    let ha = h.abs();
    let residual = |m: f64| m - ms * langevin((ha + alpha * m) / a_j);
    let cfg = RootConfig::bracketed(0.0, ms)
        .with_tolerances(IMPLICIT_ABS_TOL * ms, 0.0)
        .with_max_iter(IMPLICIT_MAX_ITER);
    let root = find_root(residual, &cfg)?;
    Ok(root.x.copysign(h))
}

/// Differential susceptibility `dM/dH` of the anhysteretic curve through
/// `(h, m)`, by implicit differentiation of `M = Ms·L((H + αM)/aJ)`.
pub fn anhysteretic_slope(h: f64, m: f64, params: &AnhystereticParams, ms: f64) -> Result<f64> {
    slope_through(h, m, params.a_j, params.alpha, ms)
}

pub(crate) fn slope_through(h: f64, m: f64, a_j: f64, alpha: f64, ms: f64) -> Result<f64> {
    let x = (h + alpha * m) / a_j;
    let gain = ms / a_j * langevin_prime(x);
    let denominator = 1.0 - alpha * gain;
    if !(denominator > 0.0) {
        return Err(Error::SingularSlope { denominator });
    }
    Ok(gain / denominator)
}

/// Low-field linearization of the paramagnet curve with moment `m1`:
/// `(Ms/3)·(μ0·m1/(kB·T))·H`.
#[inline]
pub fn linearized_anhysteretic(h: f64, m1: f64, ms: f64, temperature: f64) -> f64 {
    ms / 3.0 * (MU0 * m1 / (BOLTZMANN * temperature)) * h
}

/// Moment of the paramagnet whose low-field susceptibility is `chi`.
#[inline]
pub fn moment_from_susceptibility(chi: f64, ms: f64, temperature: f64) -> f64 {
    3.0 * BOLTZMANN * temperature * chi / (MU0 * ms)
}

/// `aJ = kB·T/(μ0·m)`.
#[inline]
pub fn shape_param_from_moment(moment: f64, temperature: f64) -> f64 {
    BOLTZMANN * temperature / (MU0 * moment)
}

/// Inverse of [`shape_param_from_moment`]; the relation is symmetric.
#[inline]
pub fn moment_from_shape_param(a_j: f64, temperature: f64) -> f64 {
    BOLTZMANN * temperature / (MU0 * a_j)
}

/// Coupling recovered from the paramagnet-equivalent and measured initial
/// susceptibilities: `1/χparam − 1/χan`. May come out negative.
#[inline]
pub fn alpha_from_susceptibilities(chi_param: f64, chi_an: f64) -> f64 {
    1.0 / chi_param - 1.0 / chi_an
}
