//! Synthetic measurement generators for a room-temperature electrical steel.

use serde::{Deserialize, Serialize};

use crate::data::{CurveKind, MagnetizationCurve, Sample};
use crate::error::Result;
use crate::hysteresis::{integrate, FieldWaveform, HysteresisParams, SimOptions};
use crate::magnetics::{anhysteretic_implicit, AnhystereticParams, MaterialSpec};

pub const STEEL_MS: f64 = 1.6e6;
pub const STEEL_TEMPERATURE: f64 = 303.5;
pub const STEEL_CURIE_TEMPERATURE: f64 = 1023.5;

/// `(aJ, α)` pairs of the validation grid.
pub const STEEL_GRID: [(f64, f64); 6] = [
    (972.0, 1.4e-3),
    (972.0, 1.0e-3),
    (972.0, 1.8e-3),
    (800.0, 1.4e-3),
    (1000.0, 1.4e-3),
    (1200.0, 1.4e-3),
];

/// Samples per synthetic anhysteretic curve and its field span, A/m.
pub const GRID_SAMPLES: usize = 200;
pub const GRID_H_MAX: f64 = 1e4;

pub fn steel() -> MaterialSpec {
    MaterialSpec::new(STEEL_MS, STEEL_TEMPERATURE)
        .expect("steel constants are valid")
        .with_curie_temperature(STEEL_CURIE_TEMPERATURE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub index: usize,
    pub a_j: f64,
    pub alpha: f64,
}

impl GridRow {
    pub fn params(&self) -> AnhystereticParams {
        AnhystereticParams::from_shape(self.a_j, self.alpha, STEEL_TEMPERATURE)
            .expect("grid parameters are valid")
    }
}

pub fn steel_grid() -> Vec<GridRow> {
    STEEL_GRID
        .iter()
        .enumerate()
        .map(|(i, &(a_j, alpha))| GridRow { index: i + 1, a_j, alpha })
        .collect()
}

/// `n` evenly spaced fields on `(0, h_max]`.
pub fn uniform_fields(n: usize, h_max: f64) -> Vec<f64> {
    (1..=n).map(|i| h_max * i as f64 / n as f64).collect()
}

pub fn anhysteretic_curve(params: &AnhystereticParams, ms: f64, fields: &[f64]) -> Result<MagnetizationCurve> {
    let samples = fields
        .iter()
        .map(|&h| Ok(Sample { h, m: anhysteretic_implicit(h, params, ms)? }))
        .collect::<Result<Vec<_>>>()?;
    MagnetizationCurve::new(samples, CurveKind::Anhysteretic)
}

/// Standard 200-point anhysteretic curve for one grid row.
pub fn grid_curve(row: &GridRow) -> Result<MagnetizationCurve> {
    anhysteretic_curve(&row.params(), STEEL_MS, &uniform_fields(GRID_SAMPLES, GRID_H_MAX))
}

/// A simulated measurement: the virgin curve and the last full cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedLoop {
    pub first_magnetization: MagnetizationCurve,
    /// From `+h_max` down to `−h_max` and back.
    pub last_cycle: MagnetizationCurve,
}

/// Run `cycles` symmetric cycles from the demagnetized state.
pub fn simulate_loop(
    params: &HysteresisParams,
    h_max: f64,
    cycles: usize,
    steps_per_segment: usize,
    opts: &SimOptions,
) -> Result<SimulatedLoop> {
    let waveform = FieldWaveform::symmetric_cycles(h_max, cycles, steps_per_segment)?;
    let curve = integrate(params, &waveform, 0.0, opts)?;
    let n = steps_per_segment;
    let first = curve.samples[..=n].to_vec();
    let tail = curve.samples[curve.samples.len() - 2 * n - 1..].to_vec();
    Ok(SimulatedLoop {
        first_magnetization: MagnetizationCurve::new(first, CurveKind::FirstMagnetization)?,
        last_cycle: MagnetizationCurve::new(tail, CurveKind::FullLoop)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let f = uniform_fields(GRID_SAMPLES, GRID_H_MAX);
        assert_eq!(f.len(), 200);
        assert_eq!(f[0], 50.0);
        assert_eq!(f[199], 1e4);
        assert_eq!(steel_grid()[3].a_j, 800.0);
        assert_eq!(steel().curie_temperature, Some(1023.5));
    }

    #[test]
    fn grid_curve_row_one() {
        let c = grid_curve(&steel_grid()[0]).unwrap();
        let at_1000 = c.samples.iter().find(|s| s.h == 1000.0).unwrap();
        assert!((at_1000.m - 963624.0885666782).abs() < 1e-3 * STEEL_MS * 1e-6);
    }

    #[test]
    fn loop_parts() {
        let p = HysteresisParams::new(972.0, 1.4e-3, 0.1, 1000.0, STEEL_MS).unwrap();
        let sim = simulate_loop(&p, 1e4, 2, 100, &SimOptions::default()).unwrap();
        assert_eq!(sim.first_magnetization.len(), 101);
        assert_eq!(sim.last_cycle.len(), 201);
        assert_eq!(sim.last_cycle.samples[0].h, 1e4);
        assert_eq!(sim.last_cycle.samples[100].h, -1e4);
    }
}
