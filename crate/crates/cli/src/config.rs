//! Scenario configuration files. Every field has a default; unknown fields are
//! rejected so typos surface as schema errors with a field path.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use spincharge::experiments::{Regression, SweepSettings};
use spincharge::{EnginePolicy, ModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Simulate,
    Landscape,
    Scaling,
    Crosstalk,
    Nonideal,
    TcBenchmark,
    Validate,
}

/// Read a scenario config, or take the defaults when no file is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("at `{path}`: {}", e.into_inner()))
    })
}

/// Reject a config written for a different subcommand.
pub fn check_scenario(found: Option<Scenario>, expected: Scenario) -> Result<(), CliError> {
    match found {
        Some(s) if s != expected => Err(CliError::Config(format!(
            "at `scenario`: config is for {s:?}, command is {expected:?}"
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub scenario: Option<Scenario>,
    pub model: ModelParams,
    /// Horizon in units of `1/g`; `8π/√N` when omitted.
    pub gt_max: Option<f64>,
    pub points: usize,
    pub policy: EnginePolicy,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::default(),
            gt_max: None,
            points: spincharge::observables::DEFAULT_POINTS,
            policy: EnginePolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandscapeConfig {
    pub scenario: Option<Scenario>,
    pub model: ModelParams,
    pub cells: Vec<u32>,
    pub ratios: Vec<f64>,
    pub gammas: Vec<f64>,
    pub regression: Regression,
    pub settings: SweepSettings,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::default(),
            cells: (1..=10).collect(),
            ratios: vec![1.0, 2.0, 10.0],
            gammas: vec![0.0],
            regression: Regression::default(),
            settings: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub scenario: Option<Scenario>,
    pub model: ModelParams,
    /// Battery sizes; derived from the tier when omitted.
    pub cells: Option<Vec<u32>>,
    pub gamma: f64,
    pub ratio: f64,
    /// Also fit the cavity reference.
    pub cavity: bool,
    pub settings: SweepSettings,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::default(),
            cells: None,
            gamma: 0.0,
            ratio: 1.0,
            cavity: true,
            settings: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrosstalkConfig {
    pub scenario: Option<Scenario>,
    pub model: ModelParams,
    pub g1_over_g: Vec<f64>,
    /// Capacity level, as a fraction of `M ω₀`, whose crossing is reported.
    pub level: f64,
    pub settings: SweepSettings,
}

impl Default for CrosstalkConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::new(2, 4),
            g1_over_g: vec![0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 6.5, 7.0, 7.5, 8.0, 10.0],
            level: 0.01,
            settings: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonidealConfig {
    pub scenario: Option<Scenario>,
    pub model: ModelParams,
    /// `N + 1` weights; index 0 is the ideal state.
    pub charger_weights: Vec<f64>,
    /// `M + 1` weights; index 0 is the ideal state.
    pub battery_weights: Vec<f64>,
    pub settings: SweepSettings,
}

impl Default for NonidealConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::new(2, 4),
            charger_weights: vec![0.6, 0.1, 0.1, 0.1, 0.1],
            battery_weights: vec![0.6, 0.2, 0.2],
            settings: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TcConfig {
    pub scenario: Option<Scenario>,
    /// Supplies `ω₀` and the bare coupling.
    pub model: ModelParams,
    pub cells: Vec<u32>,
    pub gamma: f64,
    pub settings: SweepSettings,
}

impl Default for TcConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            model: ModelParams::default(),
            cells: (1..=10).collect(),
            gamma: 0.0,
            settings: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub scenario: Option<Scenario>,
    /// Random sample times per amplitude check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { scenario: None, samples: 200, seed: 7 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_reports_path() {
        let err = parse::<SimulateConfig>(r#"{"model": {"cells": 2, "gama": 0.1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("model.gama") || msg.contains("model"), "{msg}");
        assert!(msg.contains("gama"));
    }

    #[test]
    fn wrong_type_reports_path() {
        let err = parse::<LandscapeConfig>(r#"{"cells": [1, "two"]}"#).unwrap_err();
        assert!(err.to_string().contains("cells[1]"), "{err}");
    }

    #[test]
    fn defaults_fill_omitted_fields() {
        let c: SimulateConfig = parse(r#"{"model": {"chargers": 4}}"#).unwrap();
        assert_eq!(c.model.cells, 2);
        assert_eq!(c.model.chargers, 4);
        assert_eq!(c.points, 4000);
    }

    #[test]
    fn scenario_mismatch_rejected() {
        assert!(check_scenario(Some(Scenario::Landscape), Scenario::Simulate).is_err());
        assert!(check_scenario(None, Scenario::Simulate).is_ok());
        let c: SimulateConfig = parse(r#"{"scenario": "tc-benchmark"}"#).unwrap();
        assert_eq!(c.scenario, Some(Scenario::TcBenchmark));
    }
}
