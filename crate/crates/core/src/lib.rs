//! Jiles-Atherton magnetization models and anhysteretic parameter estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`langevin`] and [`magnetics`]: Langevin-family functions, explicit and
//!   self-consistent anhysteretic curves, and the moment/susceptibility
//!   algebra that links the shape parameter `aJ` to a pseudo-domain moment.
//! - [`root`]: a bracketed, bisection-safeguarded scalar root finder.
//! - [`japar`]: the linearization-based estimator that recovers `aJ` and
//!   `alpha` from a single anhysteretic curve by sweeping a scale factor
//!   `eta` and minimising the reconstruction residual.
//! - [`hysteresis`]: fixed-step RK4 integration of the JA ODE over
//!   piecewise-linear field waveforms.
//! - [`jiles92`]: the classical loop-feature estimator used as a baseline.
//! - [`data`] and [`features`]: measurement parsing, unit handling and
//!   extraction of loop features (coercivity, remanence, tip, slopes).
//! - [`synthetic`]: generators for the electrical-steel validation grid.
//!
//! All quantities are SI: fields and magnetizations in A/m, moments in
//! A·m², temperatures in K, residuals in tesla.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod data;
pub mod error;
pub mod features;
pub mod hysteresis;
pub mod japar;
pub mod jiles92;
pub mod langevin;
pub mod magnetics;
pub mod root;
pub mod synthetic;

pub use constants::{PhysicalConstants, BOLTZMANN, MU0};
pub use data::{CurveKind, FormatOptions, MagnetizationCurve, Sample, SourceUnit};
pub use error::{Error, Result, RootError};
pub use features::{extract_features, FeatureOptions, LoopFeatures};
pub use hysteresis::{
    AnhystereticCoupling, Direction, FieldWaveform, HysteresisParams, SimOptions,
};
pub use japar::{FitReport, JaParConfig, SusceptibilityRule, SweepMode};
pub use jiles92::{Jiles92Config, Jiles92Report};
pub use langevin::{langevin, langevin_prime};
pub use magnetics::{AnhystereticParams, MaterialSpec};
pub use root::{find_root, Root, RootConfig};
