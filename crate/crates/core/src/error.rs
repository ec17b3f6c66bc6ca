use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures of the scalar root finder.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("bracket [{lo}, {hi}] does not contain a sign change (f = {f_lo}, {f_hi})")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("no sign change found after {expansions} bracket expansions")]
    NoSignChange { expansions: usize },
    #[error("root iteration did not converge in {iterations} iterations (last x = {x})")]
    NoConvergence { iterations: usize, x: f64 },
    #[error("invalid root configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("anhysteretic curve is multivalued: alpha*Ms/(3*aJ) = {ratio} >= 1")]
    UnstableParams { ratio: f64 },

    #[error("anhysteretic slope is singular (denominator {denominator})")]
    SingularSlope { denominator: f64 },

    #[error(transparent)]
    Root(#[from] RootError),

    #[error("data contains no sample with H > 0 and M > 0")]
    NoPositiveSample,

    #[error("no chi_param solution: {0}")]
    NoSolution(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("eta sweep failed at its first point (eta = {eta}): {reason}")]
    DegenerateSweep { eta: f64, reason: String },

    #[error("JA ODE denominator is singular at H = {h}, M = {m}{}", step_suffix(*step))]
    SingularDenominator {
        h: f64,
        m: f64,
        step: Option<usize>,
    },

    #[error("|M| = {m} exceeds Ms at integration step {step}")]
    SaturationExceeded { m: f64, step: usize },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("reversibility c = 1 makes the pinning relations degenerate")]
    DegenerateC,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unit error: {0}")]
    Unit(String),

    #[error("input contains no data rows")]
    EmptyFile,

    #[error("io error: {0}")]
    Io(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("loop is missing its {0} branch")]
    MissingBranch(&'static str),

    #[error("insufficient samples in {what}: need {needed}, found {found}")]
    InsufficientSamples {
        what: &'static str,
        needed: usize,
        found: usize,
    },
}

fn step_suffix(step: Option<usize>) -> String {
    step.map(|s| format!(" (step {s})")).unwrap_or_default()
}

impl Error {
    /// True for errors caused by the caller's data or arguments rather than
    /// by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::NoPositiveSample
                | Error::LengthMismatch { .. }
                | Error::Parse { .. }
                | Error::Unit(_)
                | Error::EmptyFile
                | Error::Io(_)
                | Error::InvalidCurve(_)
                | Error::MissingBranch(_)
                | Error::InsufficientSamples { .. }
                | Error::DegenerateC
                | Error::ZeroDenominator(_)
                | Error::UnstableParams { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
