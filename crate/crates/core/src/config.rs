//! Strict JSON experiment configs.
//!
//! A config is one JSON object whose `"command"` key selects the record type.
//! Unknown keys are rejected, missing optional keys get defaults, and every
//! numeric field is range-checked at load. Errors carry the offending field
//! path.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bound::{BoundMode, CapRule};
use crate::classifier::LossKind;
use crate::divergence::IntegrationGrid;
use crate::experiment::{SweepGrid, SweepSettings, TrialConfig, DEFAULT_N_TEST, DEFAULT_RUNS, DEFAULT_SIGMA};
use crate::gamma::Gamma;

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_KL_DRAWS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("config must be a JSON object with a \"command\" string")]
    MissingCommand,
    #[error("unknown command `{0}` (expected sweep, predict, optimal-mg, kl-check or single-trial)")]
    UnknownCommand(String),
    #[error("at `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("`{field}` out of range: {message}")]
    OutOfRange { field: String, message: String },
}

impl ConfigError {
    fn range(field: &str, message: impl Into<String>) -> Self {
        ConfigError::OutOfRange {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

fn default_runs() -> u64 {
    DEFAULT_RUNS
}
fn default_sigma() -> f64 {
    DEFAULT_SIGMA
}
fn default_n_test() -> usize {
    DEFAULT_N_TEST
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_kl_draws() -> usize {
    DEFAULT_KL_DRAWS
}
fn default_nodes() -> usize {
    IntegrationGrid::default().nodes()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub d: Vec<usize>,
    #[serde(rename = "m_S")]
    pub m_s: Vec<u64>,
    pub gamma: Vec<Gamma>,
    #[serde(default = "default_runs")]
    pub runs: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid::new(self.d.clone(), self.m_s.clone(), self.gamma.clone())
    }

    pub fn settings(&self) -> SweepSettings {
        SweepSettings {
            runs: self.runs,
            sigma: self.sigma,
            n_test: self.n_test,
            loss: self.loss,
            master_seed: self.master_seed,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub d: Vec<usize>,
    #[serde(rename = "m_S")]
    pub m_s: Vec<u64>,
    pub gamma: Vec<Gamma>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub mode: BoundMode,
    #[serde(default)]
    pub cap: CapRule,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl PredictConfig {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid::new(self.d.clone(), self.m_s.clone(), self.gamma.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalMgConfig {
    pub d: Vec<usize>,
    #[serde(rename = "m_S")]
    pub m_s: Vec<u64>,
    pub gamma: Vec<Gamma>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub mode: BoundMode,
    #[serde(default)]
    pub cap: CapRule,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlCheckConfig {
    #[serde(default = "default_kl_draws")]
    pub draws: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for KlCheckConfig {
    fn default() -> Self {
        Self {
            draws: DEFAULT_KL_DRAWS,
            master_seed: 0,
            nodes: default_nodes(),
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleTrialConfig {
    pub d: usize,
    #[serde(rename = "m_S")]
    pub m_s: u64,
    #[serde(default)]
    pub gamma: Gamma,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub trial_index: u64,
}

impl SingleTrialConfig {
    pub fn trial(&self) -> TrialConfig {
        TrialConfig {
            d: self.d,
            m_s: self.m_s,
            gamma: self.gamma,
            sigma: self.sigma,
            n_test: self.n_test,
            loss: self.loss,
            master_seed: self.master_seed,
            trial_index: self.trial_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Sweep(SweepConfig),
    Predict(PredictConfig),
    OptimalMg(OptimalMgConfig),
    KlCheck(KlCheckConfig),
    SingleTrial(SingleTrialConfig),
}

impl ExperimentConfig {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Sweep(_) => "sweep",
            ExperimentConfig::Predict(_) => "predict",
            ExperimentConfig::OptimalMg(_) => "optimal-mg",
            ExperimentConfig::KlCheck(_) => "kl-check",
            ExperimentConfig::SingleTrial(_) => "single-trial",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization is infallible")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ExperimentConfig::Sweep(c) => {
                check_grid(&c.d, &c.m_s, &c.gamma)?;
                check_at_least("runs", c.runs, 1)?;
                check_sigma(c.sigma)?;
                check_at_least("n_test", c.n_test as u64, 1)?;
                check_workers(c.workers)
            }
            ExperimentConfig::Predict(c) => {
                check_grid(&c.d, &c.m_s, &c.gamma)?;
                check_delta(c.delta)
            }
            ExperimentConfig::OptimalMg(c) => {
                check_grid(&c.d, &c.m_s, &c.gamma)?;
                check_delta(c.delta)
            }
            ExperimentConfig::KlCheck(c) => {
                check_at_least("draws", c.draws as u64, 1)?;
                check_at_least("nodes", c.nodes as u64, IntegrationGrid::MIN_NODES as u64)
            }
            ExperimentConfig::SingleTrial(c) => {
                check_grid(&[c.d], &[c.m_s], &[c.gamma])?;
                check_sigma(c.sigma)?;
                check_at_least("n_test", c.n_test as u64, 1)
            }
        }
    }
}

pub const PRESET_NAMES: [&str; 6] = ["fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f"];

/// γ grid shared by every preset.
pub fn preset_gamma_grid() -> Vec<Gamma> {
    [0, 1, 2, 5, 10, 20, 50].into_iter().map(Gamma::integer).collect()
}

fn preset_sweep(d: Vec<usize>, m_s: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig::Sweep(SweepConfig {
        d,
        m_s,
        gamma: preset_gamma_grid(),
        runs: DEFAULT_RUNS,
        master_seed: 0,
        sigma: DEFAULT_SIGMA,
        n_test: DEFAULT_N_TEST,
        loss: LossKind::Nll,
        workers: None,
        out: None,
    })
}

fn preset_predict(d: usize, m_s: u64) -> ExperimentConfig {
    ExperimentConfig::Predict(PredictConfig {
        d: vec![d],
        m_s: vec![m_s],
        gamma: preset_gamma_grid(),
        delta: DEFAULT_DELTA,
        mode: BoundMode::Predict,
        cap: CapRule::Max,
        out: None,
    })
}

/// Config for one of the figure panels: a/d sweep over `m_S`/`d`, b/e measure
/// truth along γ, c/f evaluate the predicted bound along γ.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    Some(match name {
        "fig1a" => preset_sweep(vec![1], vec![20, 50, 100, 200, 500]),
        "fig1b" => preset_sweep(vec![1], vec![40]),
        "fig1c" => preset_predict(1, 40),
        "fig1d" => preset_sweep(vec![2, 10, 25, 50, 100], vec![10]),
        "fig1e" => preset_sweep(vec![50], vec![10]),
        "fig1f" => preset_predict(50, 10),
        _ => return None,
    })
}

fn check_at_least(field: &str, v: u64, min: u64) -> Result<(), ConfigError> {
    if v >= min {
        Ok(())
    } else {
        Err(ConfigError::range(field, format!("must be at least {min}, got {v}")))
    }
}

fn check_sigma(sigma: f64) -> Result<(), ConfigError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::range("sigma", format!("must be positive, got {sigma}")))
    }
}

fn check_delta(delta: f64) -> Result<(), ConfigError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::range("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

fn check_workers(workers: Option<usize>) -> Result<(), ConfigError> {
    match workers {
        Some(0) => Err(ConfigError::range("workers", "must be at least 1")),
        _ => Ok(()),
    }
}

fn check_grid(d: &[usize], m_s: &[u64], gamma: &[Gamma]) -> Result<(), ConfigError> {
    for (field, empty) in [
        ("d", d.is_empty()),
        ("m_S", m_s.is_empty()),
        ("gamma", gamma.is_empty()),
    ] {
        if empty {
            return Err(ConfigError::range(field, "list must be nonempty"));
        }
    }
    if let Some((i, _)) = d.iter().enumerate().find(|(_, &v)| v < 1) {
        return Err(ConfigError::range(&format!("d[{i}]"), "must be at least 1"));
    }
    if let Some((i, _)) = m_s.iter().enumerate().find(|(_, &v)| v < 1) {
        return Err(ConfigError::range(&format!("m_S[{i}]"), "must be at least 1"));
    }
    // The generator needs two real points per class.
    if gamma.iter().any(|g| !g.is_zero()) {
        if let Some((i, v)) = m_s.iter().enumerate().find(|(_, &v)| v < 4) {
            return Err(ConfigError::range(
                &format!("m_S[{i}]"),
                format!("must be at least 4 when gamma > 0, got {v}"),
            ));
        }
    }
    Ok(())
}

fn deserialize_at<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Field {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    let serde_json::Value::Object(mut obj) = value else {
        return Err(ConfigError::MissingCommand);
    };
    let command = match obj.remove("command") {
        Some(serde_json::Value::String(s)) => s,
        _ => return Err(ConfigError::MissingCommand),
    };
    let rest = serde_json::Value::Object(obj);
    let cfg = match command.as_str() {
        "sweep" => ExperimentConfig::Sweep(deserialize_at(rest)?),
        "predict" => ExperimentConfig::Predict(deserialize_at(rest)?),
        "optimal-mg" => ExperimentConfig::OptimalMg(deserialize_at(rest)?),
        "kl-check" => ExperimentConfig::KlCheck(deserialize_at(rest)?),
        "single-trial" => ExperimentConfig::SingleTrial(deserialize_at(rest)?),
        other => return Err(ConfigError::UnknownCommand(other.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}
