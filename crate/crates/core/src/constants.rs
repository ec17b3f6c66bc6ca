//! Physical constants.

use std::f64::consts::PI;

/// Boltzmann constant, J/K (SI-defined).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Vacuum permeability, H/m. The pre-2019 exact value `4π×10⁻⁷` is used so
/// that tesla/ampere-per-metre conversions are reproducible bit for bit.
pub const MU0: f64 = 4.0 * PI * 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalConstants {
    pub k_b: f64,
    pub mu0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            k_b: BOLTZMANN,
            mu0: MU0,
        }
    }
}

impl PhysicalConstants {
    /// `kB·T/μ0`, the invariant product `aJ·m` at temperature `t`.
    pub fn thermal_moment_product(&self, t: f64) -> f64 {
        self.k_b * t / self.mu0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu0_matches_codata_closely() {
        let codata = 1.256_637_062_12e-6;
        assert!(((MU0 - codata) / codata).abs() < 1e-9);
    }

    #[test]
    fn boltzmann_is_exact() {
        assert_eq!(PhysicalConstants::default().k_b, 1.380649e-23);
    }
}
