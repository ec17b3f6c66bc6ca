//! Jiles-Atherton hysteresis simulation.
//!
//! Integrates
//!
//! ```text
//! dM/dH = 1/(1+c) · (M_an − M)/(δk − α(M_an − M)) + c/(1+c) · dM_an/dH
//! ```
//!
//! in `H` with a fixed-step classical RK4 scheme, `δ` being the sign of the
//! field increment on each waveform segment.

use serde::{Deserialize, Serialize};

use crate::data::{CurveKind, MagnetizationCurve, Sample, SourceUnit};
use crate::error::{Error, Result};
use crate::features::LoopFeatures;
use crate::langevin::langevin;
use crate::magnetics::{implicit_magnetization, slope_through, AnhystereticParams};

/// Full JA parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisParams {
    /// Shape parameter, A/m.
    pub a_j: f64,
    pub alpha: f64,
    /// Reversibility, dimensionless.
    pub c: f64,
    /// Pinning, A/m.
    pub k: f64,
    /// Saturation magnetization, A/m.
    pub ms: f64,
}

impl HysteresisParams {
    pub fn new(a_j: f64, alpha: f64, c: f64, k: f64, ms: f64) -> Result<Self> {
        let p = Self { a_j, alpha, c, k, ms };
        p.validate()?;
        Ok(p)
    }

    pub fn from_anhysteretic(p: &AnhystereticParams, c: f64, k: f64, ms: f64) -> Result<Self> {
        Self::new(p.a_j, p.alpha, c, k, ms)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("aJ", self.a_j), ("k", self.k), ("Ms", self.ms)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !self.c.is_finite() || self.c <= -1.0 {
            return Err(Error::InvalidParameter(format!("c must be > -1, got {}", self.c)));
        }
        Ok(())
    }

    /// Codes for parameter values that integrate but are outside the usual
    /// physical range.
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut w = Vec::new();
        if !(0.0..=1.0).contains(&self.c) {
            w.push("c_outside_unit_interval");
        }
        if self.alpha * self.ms / (3.0 * self.a_j) >= 1.0 {
            w.push("multivalued_anhysteretic");
        }
        w
    }
}

/// Sign of `dH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Ascending => 1.0,
            Direction::Descending => -1.0,
        }
    }

    pub fn of(dh: f64) -> Option<Self> {
        if dh > 0.0 {
            Some(Direction::Ascending)
        } else if dh < 0.0 {
            Some(Direction::Descending)
        } else {
            None
        }
    }
}

/// Which anhysteretic magnetization drives the ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnhystereticCoupling {
    /// `M_an = Ms·L((H + αM)/aJ)` with the current state `M`.
    #[default]
    EffectiveField,
    /// `M_an(H)` solved self-consistently, independent of the state.
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimOptions {
    /// Zero the irreversible term when `δ·(M_an − M) < 0`.
    pub clamp: bool,
    pub coupling: AnhystereticCoupling,
}

/// Right-hand side of the JA ODE from the anhysteretic offset `M_an − M`
/// and slope `dM_an/dH`.
pub fn ja_slope(
    offset: f64,
    anhysteretic_slope: f64,
    direction: Direction,
    params: &HysteresisParams,
    clamp: bool,
) -> Result<f64> {
    let delta = direction.sign();
    let denominator = delta * params.k - params.alpha * offset;
    if !(denominator.abs() > 1e-12 * params.k) {
        return Err(Error::SingularDenominator {
            h: f64::NAN,
            m: f64::NAN,
            step: None,
        });
    }
    let irreversible = if clamp && delta * offset < 0.0 {
        0.0
    } else {
        offset / denominator
    };
    let c = params.c;
    Ok(irreversible / (1.0 + c) + c / (1.0 + c) * anhysteretic_slope)
}

/// `dM/dH` at state `(h, m)` moving in `direction`.
pub fn dm_dh(
    h: f64,
    m: f64,
    direction: Direction,
    params: &HysteresisParams,
    opts: &SimOptions,
) -> Result<f64> {
    let HysteresisParams { a_j, alpha, ms, .. } = *params;
    let m_an = match opts.coupling {
        AnhystereticCoupling::EffectiveField => ms * langevin((h + alpha * m) / a_j),
        AnhystereticCoupling::SelfConsistent => implicit_magnetization(h, a_j, alpha, ms)?,
    };
    let slope_state = match opts.coupling {
        AnhystereticCoupling::EffectiveField => m,
        AnhystereticCoupling::SelfConsistent => m_an,
    };
    let d_an = slope_through(h, slope_state, a_j, alpha, ms)?;
    ja_slope(m_an - m, d_an, direction, params, opts.clamp).map_err(|e| match e {
        Error::SingularDenominator { step, .. } => Error::SingularDenominator { h, m, step },
        other => other,
    })
}

/// Piecewise-linear field program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldWaveform {
    /// Turning points, starting field first, A/m.
    pub targets: Vec<f64>,
    pub steps_per_segment: usize,
}

impl FieldWaveform {
    pub fn new(targets: Vec<f64>, steps_per_segment: usize) -> Result<Self> {
        let w = Self {
            targets,
            steps_per_segment,
        };
        w.validate()?;
        Ok(w)
    }

    /// `0 → Hm`, then `cycles` repetitions of `Hm → −Hm → Hm`.
    pub fn symmetric_cycles(h_max: f64, cycles: usize, steps_per_segment: usize) -> Result<Self> {
        if !(h_max > 0.0) {
            return Err(Error::InvalidParameter(format!("hmax must be > 0, got {h_max}")));
        }
        let mut targets = vec![0.0, h_max];
        for _ in 0..cycles {
            targets.push(-h_max);
            targets.push(h_max);
        }
        Self::new(targets, steps_per_segment)
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.len() < 2 {
            return Err(Error::InvalidParameter("waveform needs at least one segment".into()));
        }
        if self.steps_per_segment < 2 {
            return Err(Error::InvalidParameter("waveform needs >= 2 steps per segment".into()));
        }
        if self.targets.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidParameter("waveform targets must be finite".into()));
        }
        if let Some(i) = self.targets.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("waveform segment {i} has zero length")));
        }
        Ok(())
    }

    pub fn segments(&self) -> usize {
        self.targets.len() - 1
    }

    /// Every integration node, starting field included.
    pub fn fields(&self) -> Vec<f64> {
        let n = self.steps_per_segment;
        let mut out = Vec::with_capacity(self.segments() * n + 1);
        out.push(self.targets[0]);
        for w in self.targets.windows(2) {
            let (a, b) = (w[0], w[1]);
            for i in 1..=n {
                // exact endpoint on the last step
                out.push(if i == n { b } else { a + (b - a) * (i as f64 / n as f64) });
            }
        }
        out
    }
}

fn rk4_step(
    h: f64,
    m: f64,
    dh: f64,
    direction: Direction,
    params: &HysteresisParams,
    opts: &SimOptions,
) -> Result<f64> {
    let k1 = dm_dh(h, m, direction, params, opts)?;
    let k2 = dm_dh(h + 0.5 * dh, m + 0.5 * dh * k1, direction, params, opts)?;
    let k3 = dm_dh(h + 0.5 * dh, m + 0.5 * dh * k2, direction, params, opts)?;
    let k4 = dm_dh(h + dh, m + dh * k3, direction, params, opts)?;
    Ok(m + dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Magnetization at each of `fields`, integrating from `m0` at `fields[0]`
/// with `substeps` RK4 steps between consecutive fields. Repeated fields
/// leave `M` unchanged.
pub fn integrate_path(
    params: &HysteresisParams,
    fields: &[f64],
    m0: f64,
    substeps: usize,
    opts: &SimOptions,
) -> Result<Vec<f64>> {
    params.validate()?;
    if substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be >= 1".into()));
    }
    if !(m0.abs() <= params.ms) {
        return Err(Error::InvalidParameter(format!("|M0| = {} exceeds Ms", m0.abs())));
    }
    let bound = params.ms * (1.0 + 1e-12);
    let mut out = Vec::with_capacity(fields.len());
    let Some(&first) = fields.first() else {
        return Ok(out);
    };
    let mut m = m0;
    out.push(m);
    let mut step = 0usize;
    let mut h_prev = first;
    for &h_next in &fields[1..] {
        if let Some(direction) = Direction::of(h_next - h_prev) {
            let dh = (h_next - h_prev) / substeps as f64;
            for j in 0..substeps {
                step += 1;
                let h = if j == 0 { h_prev } else { h_prev + j as f64 * dh };
                m = rk4_step(h, m, dh, direction, params, opts).map_err(|e| match e {
                    Error::SingularDenominator { h, m, .. } => Error::SingularDenominator {
                        h,
                        m,
                        step: Some(step),
                    },
                    other => other,
                })?;
                if !(m.abs() <= bound) {
                    return Err(Error::SaturationExceeded { m, step });
                }
            }
        }
        out.push(m);
        h_prev = h_next;
    }
    Ok(out)
}

/// Integrate along a waveform, sampling every step.
///
/// The irreversible term is stiff on the scale of `k`: field steps much
/// above `k/10` can overshoot and end in [`Error::SaturationExceeded`].
pub fn integrate(
    params: &HysteresisParams,
    waveform: &FieldWaveform,
    m0: f64,
    opts: &SimOptions,
) -> Result<MagnetizationCurve> {
    waveform.validate()?;
    let fields = waveform.fields();
    let m = integrate_path(params, &fields, m0, 1, opts)?;
    Ok(MagnetizationCurve {
        samples: fields.into_iter().zip(m).map(|(h, m)| Sample { h, m }).collect(),
        source_units: SourceUnit::MAPerM,
        kind: CurveKind::FullLoop,
    })
}

/// Largest `|ΔM|` between the last two full cycles of a curve produced by
/// [`integrate`] on a [`FieldWaveform::symmetric_cycles`] program. `None` if
/// fewer than two cycles were run.
pub fn cycle_drift(curve: &MagnetizationCurve, waveform: &FieldWaveform) -> Option<f64> {
    let per_cycle = 2 * waveform.steps_per_segment;
    let n = curve.samples.len();
    if waveform.segments() < 5 || n < 2 * per_cycle + 1 {
        return None;
    }
    let last = &curve.samples[n - per_cycle - 1..];
    let prev = &curve.samples[n - 2 * per_cycle - 1..n - per_cycle];
    Some(
        last.iter()
            .zip(prev)
            .map(|(a, b)| (a.m - b.m).abs())
            .fold(0.0, f64::max),
    )
}

/// `c` and `k` from loop features: `c = χ'in/χ'an`, `k = Hc`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopParams {
    pub c: f64,
    pub k: f64,
    pub warnings: Vec<&'static str>,
}

pub fn loop_params_from_features(features: &LoopFeatures) -> Result<LoopParams> {
    if features.chi_an == 0.0 {
        return Err(Error::ZeroDenominator("c = chi_in / chi_an"));
    }
    let c = features.chi_in / features.chi_an;
    let k = features.hc;
    let mut warnings = Vec::new();
    if c >= 1.0 {
        warnings.push("fully_reversible");
    }
    if k <= 0.0 {
        warnings.push("lossless_material");
    }
    Ok(LoopParams { c, k, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MS: f64 = 1.6e6;

    fn steel(c: f64, k: f64) -> HysteresisParams {
        HysteresisParams::new(972.0, 1.4e-3, c, k, MS).unwrap()
    }

    #[test]
    fn ja_slope_arithmetic() {
        let p = HysteresisParams::new(972.0, 1.4e-3, 0.1, 1500.0, MS).unwrap();
        let s = ja_slope(1000.0, 100.0, Direction::Ascending, &p, false).unwrap();
        // 1000/(1500 − 1.4)/1.1 + 100·0.1/1.1
        assert_relative_eq!(s, 0.606_626_791_065_600_6 + 9.090_909_090_909_092, max_relative = 1e-12);
        assert_relative_eq!(s, 9.697, max_relative = 1e-4);
    }

    #[test]
    fn ja_slope_on_anhysteretic() {
        let p = steel(0.3, 500.0);
        let s = ja_slope(0.0, 250.0, Direction::Descending, &p, false).unwrap();
        assert_relative_eq!(s, 0.3 / 1.3 * 250.0, max_relative = 1e-15);
    }

    #[test]
    fn ja_slope_singular() {
        let p = steel(0.1, 1.4);
        assert!(matches!(
            ja_slope(1000.0, 1.0, Direction::Ascending, &p, false),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn clamp_zeroes_irreversible_term() {
        let p = steel(0.2, 500.0);
        let free = ja_slope(-1000.0, 10.0, Direction::Ascending, &p, false).unwrap();
        let clamped = ja_slope(-1000.0, 10.0, Direction::Ascending, &p, true).unwrap();
        assert!(free < clamped);
        assert_relative_eq!(clamped, 0.2 / 1.2 * 10.0, max_relative = 1e-15);
        // same sign: no clamping
        assert_eq!(
            ja_slope(1000.0, 10.0, Direction::Ascending, &p, true).unwrap(),
            ja_slope(1000.0, 10.0, Direction::Ascending, &p, false).unwrap()
        );
    }

    #[test]
    fn waveform_validation() {
        assert!(FieldWaveform::new(vec![0.0], 10).is_err());
        assert!(FieldWaveform::new(vec![0.0, 1.0], 1).is_err());
        assert!(FieldWaveform::new(vec![0.0, 1.0, 1.0], 10).is_err());
        let w = FieldWaveform::symmetric_cycles(100.0, 2, 4).unwrap();
        assert_eq!(w.targets, vec![0.0, 100.0, -100.0, 100.0, -100.0, 100.0]);
        let f = w.fields();
        assert_eq!(f.len(), 5 * 4 + 1);
        assert_eq!(f[4], 100.0);
        assert_eq!(f[8], -100.0);
    }

    #[test]
    fn params_validation() {
        assert!(HysteresisParams::new(972.0, 1e-3, 0.1, 0.0, MS).is_err());
        assert!(HysteresisParams::new(972.0, -1e-3, 0.1, 10.0, MS).is_err());
        assert!(HysteresisParams::new(-972.0, 1e-3, 0.1, 10.0, MS).is_err());
        assert_eq!(steel(1.5, 10.0).warnings(), vec!["c_outside_unit_interval"]);
    }

    #[test]
    fn pinning_dominated_state_barely_moves() {
        let p = HysteresisParams::new(972.0, 1.4e-3, 0.0, 1e12, MS).unwrap();
        let w = FieldWaveform::new(vec![0.0, 200.0, -200.0, 0.0], 200).unwrap();
        let curve = integrate(&p, &w, 0.0, &SimOptions::default()).unwrap();
        let max = curve.samples.iter().map(|s| s.m.abs()).fold(0.0, f64::max);
        assert!(max < 1e-3 * MS, "{max}");
    }

    #[test]
    fn rejects_bad_initial_state() {
        let p = steel(0.1, 500.0);
        assert!(integrate_path(&p, &[0.0, 1.0], 2.0 * MS, 1, &SimOptions::default()).is_err());
        assert!(integrate_path(&p, &[], 0.0, 1, &SimOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn loop_params() {
        let f = LoopFeatures {
            chi_in: 50.0,
            chi_an: 500.0,
            hc: 120.0,
            ..LoopFeatures::default()
        };
        let lp = loop_params_from_features(&f).unwrap();
        assert_relative_eq!(lp.c, 0.1);
        assert_eq!(lp.k, 120.0);
        assert!(lp.warnings.is_empty());

        let lp = loop_params_from_features(&LoopFeatures { chi_in: 500.0, ..f }).unwrap();
        assert_eq!(lp.c, 1.0);
        assert_eq!(lp.warnings, vec!["fully_reversible"]);

        let lp = loop_params_from_features(&LoopFeatures { hc: 0.0, ..f }).unwrap();
        assert_eq!(lp.warnings, vec!["lossless_material"]);

        assert!(loop_params_from_features(&LoopFeatures { chi_an: 0.0, ..f }).is_err());
    }
}
