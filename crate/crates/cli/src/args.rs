use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use japar_core::{CurveKind, FormatOptions, JaParConfig, SourceUnit, SweepMode};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "japar", version, about = "Jiles-Atherton parameter estimation and loop simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate aJ and alpha from an anhysteretic curve.
    FitAnhysteretic(FitAnhystereticArgs),
    /// Estimate aJ, alpha, c and k from loop measurements with the classical iterative method.
    FitJiles92(FitJiles92Args),
    /// Integrate the JA equation over a symmetric field program.
    SimulateLoop(SimulateArgs),
    /// Extract loop features (coercivity, remanence, tip, slopes).
    Extract(ExtractArgs),
    /// Run the synthetic electrical-steel round trip and print a pass/fail table.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FitAnhysteretic(_) => "fit-anhysteretic",
            Command::FitJiles92(_) => "fit-jiles92",
            Command::SimulateLoop(_) => "simulate-loop",
            Command::Extract(_) => "extract",
            Command::Validate(_) => "validate",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::FitAnhysteretic(a) => &a.common,
            Command::FitJiles92(a) => &a.common,
            Command::SimulateLoop(a) => &a.common,
            Command::Extract(a) => &a.common,
            Command::Validate(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum UnitArg {
    /// Magnetization, A/m.
    M,
    /// Polarization J, tesla.
    J,
    /// Flux density B, tesla.
    B,
}

impl From<UnitArg> for SourceUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::M => SourceUnit::MAPerM,
            UnitArg::J => SourceUnit::JTesla,
            UnitArg::B => SourceUnit::BTesla,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Saturation magnetization, A/m.
    #[arg(long)]
    pub ms: Option<f64>,
    /// Temperature, K.
    #[arg(long)]
    pub temp: Option<f64>,
    /// Unit of the second data column.
    #[arg(long, value_enum, default_value = "m")]
    pub unit: UnitArg,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical reports.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ColumnArgs {
    /// Column separator; detected among `,` `;` and tab when omitted.
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Zero-based field column.
    #[arg(long, default_value_t = 0)]
    pub h_col: usize,
    /// Zero-based magnetization column.
    #[arg(long, default_value_t = 1)]
    pub m_col: usize,
    /// Rows to skip before data; a single non-numeric header is skipped when omitted.
    #[arg(long)]
    pub header_rows: Option<usize>,
}

impl ColumnArgs {
    pub fn format(&self, unit: UnitArg, kind: CurveKind) -> FormatOptions {
        FormatOptions {
            delimiter: self.delimiter,
            h_column: self.h_col,
            m_column: self.m_col,
            header_rows: self.header_rows,
            unit: unit.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Argmin,
    FirstLocalMin,
}

#[derive(Debug, Clone, Args)]
pub struct JaParArgs {
    /// Reference field of the high-field paramagnet, A/m.
    #[arg(long, default_value_t = 1e6)]
    pub ha1: f64,
    /// First scale factor of the sweep.
    #[arg(long, default_value_t = 0.9)]
    pub eta0: f64,
    /// Sweep increment.
    #[arg(long, default_value_t = 1e-5)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "argmin")]
    pub sweep: SweepArg,
    /// Coarse-to-fine stride (argmin only); the result is identical to a full sweep.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Evaluate the sweep on one thread.
    #[arg(long)]
    pub serial: bool,
}

impl JaParArgs {
    pub fn config(&self) -> JaParConfig {
        JaParConfig {
            ha1: self.ha1,
            eta0: self.eta0,
            eps: self.eps,
            sweep_mode: match self.sweep {
                SweepArg::Argmin => SweepMode::FullArgmin,
                SweepArg::FirstLocalMin => SweepMode::FirstLocalMin,
            },
            coarse_stride: self.stride,
            parallel: !self.serial,
            ..JaParConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitAnhystereticArgs {
    /// Anhysteretic curve file (H, M columns).
    pub data: PathBuf,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[command(flatten)]
    pub japar: JaParArgs,
    /// Write (H, M_data, M_fit, r) here; defaults to `<out>.curve.csv` when --out is set.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LoopInputs {
    /// First magnetization curve file.
    #[arg(long)]
    pub first: Option<PathBuf>,
    /// Hysteresis loop file, in measurement order.
    #[arg(long = "loop")]
    pub loop_data: Option<PathBuf>,
    /// Anhysteretic curve file.
    #[arg(long)]
    pub anhysteretic: Option<PathBuf>,
    /// Samples in the least-squares slope at the origin.
    #[arg(long, default_value_t = 5)]
    pub origin_window: usize,
    #[command(flatten)]
    pub columns: ColumnArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitJiles92Args {
    #[command(flatten)]
    pub inputs: LoopInputs,
    /// Loop features JSON (from `extract`) used instead of --first/--anhysteretic.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Alpha seeds, tried in order.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-4, 1e-3, 1e-2, 1e-1])]
    pub seeds: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Loop MSE threshold, T².
    #[arg(long, default_value_t = 1e-3)]
    pub fit_tol: f64,
    /// RK4 steps between measured fields in the re-simulation.
    #[arg(long, default_value_t = 4)]
    pub substeps: usize,
    /// Zero the irreversible term when it would make dM/dH negative.
    #[arg(long)]
    pub clamp: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Read aJ and alpha (and c, k if present) from a fit report.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Shape parameter aJ, A/m.
    #[arg(long)]
    pub aj: Option<f64>,
    /// Interdomain coupling.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Reversibility, in [0, 1).
    #[arg(long)]
    pub c: Option<f64>,
    /// Pinning parameter, A/m.
    #[arg(long)]
    pub k: Option<f64>,
    /// Field amplitude, A/m.
    #[arg(long, default_value_t = 1e4)]
    pub hmax: f64,
    /// Full cycles after the initial rise.
    #[arg(long, default_value_t = 3)]
    pub cycles: usize,
    /// RK4 steps per waveform segment.
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    /// Initial magnetization, A/m.
    #[arg(long, default_value_t = 0.0)]
    pub m0: f64,
    /// Zero the irreversible term when it would make dM/dH negative.
    #[arg(long)]
    pub clamp: bool,
    /// Drive the ODE with the field-only self-consistent anhysteretic curve.
    #[arg(long)]
    pub self_consistent: bool,
    /// Write (H, M, B) here; defaults to `<out>.curve.csv` when --out is set.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub inputs: LoopInputs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub japar: JaParArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
