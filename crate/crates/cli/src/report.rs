use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

impl Warning {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub stage: &'static str,
    pub message: String,
}

/// Everything a run produced. Field order is the serialized key order;
/// nested `Value` maps are sorted.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: Tool,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    pub config: Value,
    pub result: Option<Value>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Failure>,
    pub exit_status: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: Tool {
                name: "japar",
                version: env!("CARGO_PKG_VERSION"),
            },
            command,
            inputs: Vec::new(),
            config: Value::Null,
            result: None,
            warnings: Vec::new(),
            error: None,
            exit_status: EXIT_OK,
            generated_at: None,
        }
    }

    /// Read an input file, record its digest and return its contents.
    pub fn read_input(&mut self, role: &'static str, path: &Path) -> std::io::Result<String> {
        let text = std::fs::read_to_string(path)?;
        self.inputs.push(InputDigest {
            role,
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values are always serializable")
}

/// Curve output path: explicit, or derived from the report path.
pub fn curve_path(explicit: Option<&PathBuf>, report: Option<&PathBuf>) -> Option<PathBuf> {
    explicit
        .cloned()
        .or_else(|| report.map(|p| p.with_extension("curve.csv")))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
