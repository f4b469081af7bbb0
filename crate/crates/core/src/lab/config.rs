//! JSON configuration blocks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::examples::{ExampleConfig, ExampleName, GridConfig};
use crate::error::{LabError, Result};
use crate::ode::{FamilyKind, Guards};
use crate::structure::Preset;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    #[serde(default)]
    pub example: Option<ExampleConfig>,
    #[serde(default)]
    pub integrate: Option<IntegrateConfig>,
    #[serde(default)]
    pub identities: Option<IdentitiesConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    /// Accepted for reproducibility bookkeeping; no command draws random
    /// numbers.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl LabConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        LabConfig::from_json(&text)
    }
}

fn default_kappa0() -> f64 {
    1.0
}

fn default_sign() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    crate::ode::DEFAULT_DT
}

/// Initial data either synthesized from `(a0, kappa, b0, bp_sign)` or taken
/// from a closed-form family at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateConfig {
    pub n: usize,
    pub h: f64,
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
    #[serde(default)]
    pub a0: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub b0: Option<f64>,
    #[serde(default = "default_sign")]
    pub bp_sign: f64,
    #[serde(default)]
    pub t0: Option<f64>,
    pub t_span: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub family: Option<FamilyKind>,
    /// Constant potential of the flat family.
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub guards: Option<Guards>,
}

/// `h` given as a number, `{"function": "<expr>"}`, or a preset such as
/// `{"preset": "csf", "c": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HModeConfig {
    Constant(f64),
    Function { function: String },
    Preset(Preset),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedStructureConfig {
    pub n: usize,
    pub b: String,
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
    pub f: String,
    pub h: HModeConfig,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalStructureConfig {
    /// Lapse of `dt²/F² + t² g_{S²}`, also used as the potential.
    pub lapse: String,
    #[serde(default)]
    pub f: Option<String>,
    pub h: HModeConfig,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFileConfig {
    pub path: String,
    pub n: usize,
    pub h: f64,
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
}

/// Where the structure under test comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureRef {
    Example(ExampleRef),
    Warped(WarpedStructureConfig),
    Conformal(ConformalStructureConfig),
    Trajectory(TrajectoryFileConfig),
    Integrate(IntegrateConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleRef {
    pub name: ExampleName,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default, rename = "R3")]
    pub r3: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

impl ExampleRef {
    pub fn to_config(&self) -> ExampleConfig {
        ExampleConfig {
            name: Some(self.name),
            m: self.m,
            r3: self.r3,
            lambda: self.lambda,
            mu: self.mu,
            h: self.h,
            n: self.n,
            f0: self.f0,
            grid: self.grid,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub structure: StructureRef,
    /// Identity ids; all of them when absent.
    #[serde(default)]
    pub suite: Option<Vec<String>>,
    #[serde(default)]
    pub h_mode: Option<HModeConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Per-identity tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
    pub inner: IntegrateConfig,
}
