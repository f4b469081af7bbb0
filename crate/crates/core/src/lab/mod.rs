//! Config-driven commands behind the `ricci-lab` binary.

pub mod commands;
pub mod config;
pub mod examples;

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub use commands::{cmd_identities, cmd_integrate, cmd_sweep, cmd_verify_example};
pub use config::LabConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "RICCI_LAB_TOL";

/// Exit code of a command plus the lines it prints and the files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn from_error(e: &LabError) -> Self {
        Outcome {
            code: exit_code(e),
            lines: vec![format!("error: {e}")],
            files: Vec::new(),
        }
    }
}

/// 1 for integration failures, 2 for everything caused by the input.
pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::StepFailure { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

/// Parses a tolerance override; `None` when the text is absent.
pub fn parse_tolerance(text: Option<&str>) -> Result<Option<f64>> {
    let Some(s) = text else { return Ok(None) };
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| LabError::Config(format!("{TOL_ENV} = '{s}' is not a number")))?;
    check_tolerance(TOL_ENV, v)?;
    Ok(Some(v))
}

/// Reads [`TOL_ENV`].
pub fn env_tolerance() -> Result<Option<f64>> {
    match std::env::var(TOL_ENV) {
        Ok(s) => parse_tolerance(Some(&s)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(LabError::Config(format!("{TOL_ENV}: {e}"))),
    }
}

pub fn check_tolerance(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::Config(format!(
            "tolerance {name} must be positive and finite, got {v}"
        )))
    }
}

/// sha256 of the canonical JSON of `{"command": command, "config": effective}`.
/// Object keys are sorted, so the hash does not depend on field order.
pub fn config_hash<T: Serialize>(command: &str, effective: &T) -> Result<String> {
    let value = serde_json::json!({
        "command": command,
        "config": serde_json::to_value(effective).map_err(|e| LabError::Config(e.to_string()))?,
    });
    let text = serde_json::to_string(&value).map_err(|e| LabError::Config(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

pub(crate) fn write_text(dir: &Path, name: &str, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| LabError::Io(format!("cannot write {}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T, files: &mut Vec<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| LabError::Io(e.to_string()))?;
    text.push('\n');
    write_text(dir, name, &text, files)
}
