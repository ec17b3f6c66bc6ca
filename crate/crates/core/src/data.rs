//! Magnetization curves and delimited-text measurement files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::MU0;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Applied field, A/m.
    pub h: f64,
    /// Magnetization, A/m.
    pub m: f64,
}

/// Physical meaning of the second data column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceUnit {
    /// Magnetization in A/m.
    #[default]
    MAPerM,
    /// Polarization `J = μ0·M` in tesla.
    JTesla,
    /// Flux density `B = μ0·(H + M)` in tesla.
    BTesla,
}

impl SourceUnit {
    /// Convert one value of this unit to magnetization in A/m.
    pub fn to_magnetization(self, h: f64, value: f64) -> f64 {
        match self {
            SourceUnit::MAPerM => value,
            SourceUnit::JTesla => value / MU0,
            SourceUnit::BTesla => value / MU0 - h,
        }
    }

    /// Inverse of [`SourceUnit::to_magnetization`].
    pub fn from_magnetization(self, h: f64, m: f64) -> f64 {
        match self {
            SourceUnit::MAPerM => m,
            SourceUnit::JTesla => MU0 * m,
            SourceUnit::BTesla => MU0 * (h + m),
        }
    }
}

impl FromStr for SourceUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "a/m" | "a_per_m" | "m_a_per_m" => Ok(SourceUnit::MAPerM),
            "j" | "j_tesla" => Ok(SourceUnit::JTesla),
            "b" | "b_tesla" => Ok(SourceUnit::BTesla),
            other => Err(Error::Unit(format!(
                "unknown magnetization unit '{other}' (expected m, j or b)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    #[default]
    Anhysteretic,
    FirstMagnetization,
    LoopBranch,
    FullLoop,
}

impl CurveKind {
    /// Whether samples must be strictly increasing in H.
    pub fn requires_monotone_field(self) -> bool {
        matches!(self, CurveKind::Anhysteretic | CurveKind::FirstMagnetization)
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveKind::Anhysteretic => "anhysteretic",
            CurveKind::FirstMagnetization => "first_magnetization",
            CurveKind::LoopBranch => "loop_branch",
            CurveKind::FullLoop => "full_loop",
        };
        f.write_str(s)
    }
}

/// Ordered `(H, M)` samples, always stored in A/m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationCurve {
    pub samples: Vec<Sample>,
    pub source_units: SourceUnit,
    pub kind: CurveKind,
}

impl MagnetizationCurve {
    pub fn new(samples: Vec<Sample>, kind: CurveKind) -> Result<Self> {
        let curve = Self {
            samples,
            source_units: SourceUnit::MAPerM,
            kind,
        };
        curve.validate(None)?;
        Ok(curve)
    }

    pub fn from_pairs<I>(pairs: I, kind: CurveKind) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::new(pairs.into_iter().map(|(h, m)| Sample { h, m }).collect(), kind)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn fields(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.h).collect()
    }

    pub fn magnetizations(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.m).collect()
    }

    /// Check finiteness, field ordering for monotone kinds and, when `ms`
    /// is known, the `|M| ≤ 1.1·Ms` sanity bound.
    pub fn validate(&self, ms: Option<f64>) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            if !s.h.is_finite() || !s.m.is_finite() {
                return Err(Error::InvalidCurve(format!("non-finite value at sample {i}")));
            }
            if let Some(ms) = ms {
                if s.m.abs() > 1.1 * ms {
                    return Err(Error::InvalidCurve(format!(
                        "|M| = {} at sample {i} exceeds 1.1·Ms",
                        s.m.abs()
                    )));
                }
            }
        }
        if self.kind.requires_monotone_field() {
            if let Some(i) = self.samples.windows(2).position(|w| !(w[1].h > w[0].h)) {
                return Err(Error::InvalidCurve(format!(
                    "{} curve needs strictly increasing H (samples {} and {})",
                    self.kind,
                    i,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Write `H<delim>M` rows with a header line.
    pub fn to_delimited(&self, delimiter: char) -> String {
        let mut out = format!("H{delimiter}M\n");
        for s in &self.samples {
            out.push_str(&format!("{:e}{delimiter}{:e}\n", s.h, s.m));
        }
        out
    }
}

/// How to read a delimited measurement file.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatOptions {
    /// Column separator; auto-detected among `,` `;` tab and whitespace when `None`.
    pub delimiter: Option<char>,
    /// Zero-based index of the field column.
    pub h_column: usize,
    /// Zero-based index of the magnetization column.
    pub m_column: usize,
    /// Rows to skip before data. `None` skips a single leading row only if it
    /// is not numeric.
    pub header_rows: Option<usize>,
    pub unit: SourceUnit,
    pub kind: CurveKind,
}

impl Default for FormatOptions {
    fn default() -> Self {
        Self {
            delimiter: None,
            h_column: 0,
            m_column: 1,
            header_rows: None,
            unit: SourceUnit::MAPerM,
            kind: CurveKind::Anhysteretic,
        }
    }
}

impl FormatOptions {
    pub fn kind(mut self, kind: CurveKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn unit(mut self, unit: SourceUnit) -> Self {
        self.unit = unit;
        self
    }
}

fn detect_delimiter(line: &str) -> Option<char> {
    [',', ';', '\t'].into_iter().find(|d| line.contains(*d))
}

fn split_fields(line: &str, delimiter: Option<char>) -> Vec<&str> {
    match delimiter {
        Some(d) if d.is_whitespace() => line.split_whitespace().collect(),
        Some(d) => line.split(d).map(str::trim).collect(),
        None => line.split_whitespace().collect(),
    }
}

/// Parse delimited text into a curve, converting the magnetization column
/// to A/m. Blank lines and lines starting with `#` are ignored.
pub fn parse_curve_str(text: &str, opts: &FormatOptions) -> Result<MagnetizationCurve> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.is_empty() {
        return Err(Error::EmptyFile);
    }
    let delimiter = opts
        .delimiter
        .or_else(|| lines.iter().find_map(|(_, l)| detect_delimiter(l)));

    let needed = opts.h_column.max(opts.m_column) + 1;
    let parse_row = |line_no: usize, line: &str| -> Result<Sample> {
        let fields = split_fields(line, delimiter);
        if fields.len() < needed {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected at least {needed} columns, found {}", fields.len()),
            });
        }
        let number = |idx: usize| -> Result<f64> {
            let cell = fields[idx];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric value '{cell}' in column {}", idx + 1),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value '{cell}'"),
                })
            }
        };
        let h = number(opts.h_column)?;
        let raw = number(opts.m_column)?;
        Ok(Sample {
            h,
            m: opts.unit.to_magnetization(h, raw),
        })
    };

    let skip = match opts.header_rows {
        Some(n) => n,
        None => {
            let (line_no, first) = lines[0];
            usize::from(parse_row(line_no, first).is_err())
        }
    };

    let mut samples = lines
        .iter()
        .skip(skip)
        .map(|&(n, l)| parse_row(n, l))
        .collect::<Result<Vec<_>>>()?;
    if samples.is_empty() {
        return Err(Error::EmptyFile);
    }
    if opts.kind.requires_monotone_field() {
        samples.sort_by(|a, b| a.h.total_cmp(&b.h));
    }
    let curve = MagnetizationCurve {
        samples,
        source_units: opts.unit,
        kind: opts.kind,
    };
    curve.validate(None)?;
    Ok(curve)
}

pub fn parse_curve(path: impl AsRef<Path>, opts: &FormatOptions) -> Result<MagnetizationCurve> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_curve_str(&text, opts)
}
