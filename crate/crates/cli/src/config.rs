//! Experiment configuration (TOML).
//!
//! ```toml
//! schema_version = 1
//! seed = 7
//!
//! [noise]            # optional
//! lambda = 0.3
//! state = "zero(16)" # defaults to |0…0⟩ of the target width
//!
//! [experiment]
//! protocol = "singlet"
//! n_pairs = 8
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Auto,
    Dense,
    Product,
    Stabilizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum Experiment {
    Singlet(SingletConfig),
    Lcs(LcsConfig),
    Hamiltonian(HamiltonianConfig),
    Witness(WitnessConfig),
    Qsv(QsvConfig),
    Sqst(SqstConfig),
    Shadows(ShadowsConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Singlet(_) => "singlet",
            Experiment::Lcs(_) => "lcs",
            Experiment::Hamiltonian(_) => "hamiltonian",
            Experiment::Witness(_) => "witness",
            Experiment::Qsv(_) => "qsv",
            Experiment::Sqst(_) => "sqst",
            Experiment::Shadows(_) => "shadows",
        }
    }
}

fn one() -> u64 {
    1
}

fn default_delta() -> f64 {
    0.01
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_groups() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingletConfig {
    pub n_pairs: usize,
    #[serde(default = "one")]
    pub repetitions: u64,
    /// Fixed deviation; post-hoc when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// One basis letter per pair; randomized when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default)]
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcsConfig {
    pub n: usize,
    #[serde(default = "one")]
    pub repetitions: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default)]
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    /// Sites of the Heisenberg ring.
    pub n: usize,
    pub delta: f64,
    #[serde(default = "one")]
    pub repetitions: u64,
    /// Ground energy per site; computed exactly when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default)]
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    /// `w1`, `w2`, `generic`, or a path to a witness file.
    pub witness: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default = "one")]
    pub repetitions: u64,
    /// Failure probability for the reported copies estimate.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsvConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    /// `stabilizer_group` or `projector`.
    pub strategy: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "one")]
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqstConfig {
    pub state: String,
    /// Copies per record; derived from `epsilon`, `delta` and the number of
    /// queries when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copies: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub elements: Vec<[usize; 2]>,
    /// Pauli strings, for qubit dimensions only.
    #[serde(default)]
    pub observables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowsConfig {
    pub state: String,
    pub snapshots: u64,
    #[serde(default = "default_ensemble")]
    pub ensemble: String,
    #[serde(default = "default_groups")]
    pub k_groups: usize,
    /// `fidelity` or Pauli strings.
    pub observables: Vec<String>,
    #[serde(default)]
    pub backend: Backend,
}

fn default_ensemble() -> String {
    "random_pauli".into()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
