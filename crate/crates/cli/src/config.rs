//! JSON experiment configuration.
//!
//! A config document selects the prediction to test, the toy-task family,
//! and the sweep axes. The precision spread `s` places the initial belief
//! at `τ₀ = 1/√s` and the reference (and data generator) at `τ* = √s`, so
//! `s = 1` is the regime where Euclidean and Fisher–Rao penalties are
//! locally equivalent (σ = 1) and larger `s` stretches the traversal
//! across increasingly anisotropic metric regions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    Gaussian,
    Vonmises,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartName {
    MuTau,
    MuSigma,
}

/// Template for the per-run toy task; the precision/concentration pair is
/// filled in from the spread axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskFamily {
    pub manifold: ManifoldKind,
    /// Mean (or mean direction) of the data generator and the reference.
    pub data_mu: f64,
    pub initial_mu: f64,
    pub reference_mu: f64,
    /// Finite data-pool size; `null` draws a fresh stream.
    pub sample_count: Option<usize>,
    pub lr: f64,
    pub steps: usize,
    /// Chart the Euclidean arm's penalty is written in (Gaussian only).
    pub euclidean_chart: ChartName,
    /// Held-out sample count for the generalization report.
    pub heldout_samples: usize,
}

impl Default for TaskFamily {
    fn default() -> Self {
        Self {
            manifold: ManifoldKind::Gaussian,
            data_mu: 1.0,
            initial_mu: -1.0,
            reference_mu: 1.0,
            sample_count: None,
            lr: 1e-2,
            steps: 5000,
            euclidean_chart: ChartName::MuTau,
            heldout_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Which prediction to evaluate: 1 or 2.
    pub prediction: u8,
    #[serde(default)]
    pub task_family: TaskFamily,
    pub penalty_weights: Vec<f64>,
    pub tau_spread: Vec<f64>,
    pub replicates: u32,
    pub seed_base: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// The frozen default Prediction-1 configuration: spread 16, i.e.
    /// τ₀ = 0.25 and τ* = 4, ten replicates of 5000 steps.
    pub fn default_prediction1() -> Self {
        Self {
            prediction: 1,
            task_family: TaskFamily::default(),
            penalty_weights: vec![1.0],
            tau_spread: vec![16.0],
            replicates: 10,
            seed_base: 42,
            output_dir: PathBuf::from("out/prediction1"),
        }
    }

    /// The frozen default Prediction-2 sweep over spreads {1, 4, 16, 64}.
    pub fn default_prediction2() -> Self {
        Self {
            prediction: 2,
            tau_spread: vec![1.0, 4.0, 16.0, 64.0],
            output_dir: PathBuf::from("out/prediction2"),
            ..Self::default_prediction1()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prediction == 1 || self.prediction == 2) {
            return Err(CliError::Config("prediction must be 1 or 2".into()));
        }
        if self.penalty_weights.is_empty() {
            return Err(CliError::Config("penalty_weights must be non-empty".into()));
        }
        if self.tau_spread.is_empty() {
            return Err(CliError::Config("tau_spread must be non-empty".into()));
        }
        if self.tau_spread.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(CliError::Config("tau_spread entries must be positive".into()));
        }
        if self
            .penalty_weights
            .iter()
            .any(|&w| !(w >= 0.0 && w.is_finite()))
        {
            return Err(CliError::Config(
                "penalty_weights entries must be finite and >= 0".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(CliError::Config("replicates must be at least 1".into()));
        }
        if self.prediction == 2 && self.tau_spread.len() < 3 {
            return Err(CliError::Config(
                "prediction 2 needs at least 3 tau_spread values".into(),
            ));
        }
        if !(self.task_family.lr > 0.0 && self.task_family.lr.is_finite()) {
            return Err(CliError::Config("lr must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default_prediction1().validate().unwrap();
        ExperimentConfig::default_prediction2().validate().unwrap();
    }

    #[test]
    fn json_roundtrip() {
        let cfg = ExperimentConfig::default_prediction2();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(ExperimentConfig::from_json("{\"prediction\": 3}").is_err());
        let mut cfg = ExperimentConfig::default_prediction1();
        cfg.penalty_weights.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default_prediction1();
        cfg.prediction = 2;
        assert!(cfg.validate().is_err(), "prediction 2 needs 3 spreads");
    }

    #[test]
    fn minimal_document_parses_with_family_defaults() {
        let text = r#"{
            "prediction": 1,
            "penalty_weights": [0.5],
            "tau_spread": [16.0],
            "replicates": 1,
            "seed_base": 7,
            "output_dir": "out/smoke"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.task_family, TaskFamily::default());
    }
}
