//! Experiment specifications read from JSON.

use std::path::Path;

use pagiant::processes::{Mode, ProcessConfig, WeightRule};
use pagiant::theory::{self, Alpha};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid spec at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid spec: {0}")]
    Invalid(String),
}

/// Parses JSON, reporting the field path of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| SpecError::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_json(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_trajectory")]
    pub trajectory_csv: String,
    #[serde(default = "default_degrees")]
    pub degree_csv: String,
    #[serde(default = "default_summary")]
    pub summary_json: String,
}

fn default_trajectory() -> String {
    "trajectory.csv".into()
}

fn default_degrees() -> String {
    "degrees.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            trajectory_csv: default_trajectory(),
            degree_csv: default_degrees(),
            summary_json: default_summary(),
        }
    }
}

/// Request to place theory values next to the simulated checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    /// k-core orders to include.
    #[serde(default)]
    pub ks: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: usize,
    pub weight_rule: WeightRule,
    #[serde(default)]
    pub mode: Mode,
    /// Defaults to the last checkpoint.
    #[serde(default)]
    pub m_max: Option<u64>,
    /// Edge counts, or multiples of `m_c` when `checkpoints_rel` is set.
    pub checkpoints: Vec<f64>,
    #[serde(default)]
    pub checkpoints_rel: bool,
    #[serde(default)]
    pub seed: u64,
    pub replicates: u64,
    /// Degrees whose fractions are summarised across replicates.
    #[serde(default)]
    pub pi_ks: Vec<u32>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub comparison: Option<Comparison>,
}

/// The `alpha` of the theory that matches a weight rule, if any.
pub fn theory_alpha(rule: &WeightRule) -> Option<Alpha> {
    match rule {
        WeightRule::LinearAlpha { alpha } => Some(Alpha::Finite(*alpha)),
        WeightRule::NegativeInteger { r } => Some(Alpha::NegativeInteger(*r)),
        WeightRule::GeneralF { .. } => None,
    }
}

impl ExperimentSpec {
    pub fn m_crit(&self) -> Result<f64, SpecError> {
        let alpha = theory_alpha(&self.weight_rule)
            .ok_or_else(|| SpecError::Invalid("m_c is only defined for alpha weight rules".into()))?;
        theory::m_crit(alpha, self.n as f64).map_err(|e| SpecError::Invalid(e.to_string()))
    }

    /// Absolute checkpoint edge counts.
    pub fn resolved_checkpoints(&self) -> Result<Vec<u64>, SpecError> {
        let scale = if self.checkpoints_rel { self.m_crit()? } else { 1.0 };
        self.checkpoints
            .iter()
            .map(|&c| {
                let m = c * scale;
                if !(m >= 0.0 && m.is_finite()) {
                    return Err(SpecError::Invalid(format!("checkpoint {c} is not a valid edge count")));
                }
                if !self.checkpoints_rel && m.fract() != 0.0 {
                    return Err(SpecError::Invalid(format!("checkpoint {c} is not an integer")));
                }
                Ok(m.round() as u64)
            })
            .collect()
    }

    pub fn process_config(&self, seed: u64) -> Result<ProcessConfig, SpecError> {
        if self.replicates == 0 {
            return Err(SpecError::Invalid("replicates must be at least 1".into()));
        }
        let o = &self.outputs;
        if o.trajectory_csv == o.degree_csv || o.trajectory_csv == o.summary_json || o.degree_csv == o.summary_json {
            return Err(SpecError::Invalid("output paths must be distinct".into()));
        }
        let checkpoints = self.resolved_checkpoints()?;
        let m_max = self
            .m_max
            .or_else(|| checkpoints.last().copied())
            .unwrap_or(0);
        let cfg = ProcessConfig {
            n: self.n,
            weight_rule: self.weight_rule.clone(),
            mode: self.mode,
            m_max,
            checkpoints,
            seed,
        };
        cfg.validate().map_err(|e| SpecError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `m = m_c (1 + eps)`
    Eps,
    /// `m = t n`
    T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n: usize,
    pub weight_rule: WeightRule,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub replicates: u64,
    pub grid: Grid,
    #[serde(default = "default_sweep_csv")]
    pub output: String,
}

fn default_sweep_csv() -> String {
    "sweep.csv".into()
}
