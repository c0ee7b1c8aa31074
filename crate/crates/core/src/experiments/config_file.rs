//! TOML scenario files: top-level keys are [`SystemConfig`] fields, and an
//! optional `[scenario]` table describes the sweep. Every key is optional.
//!
//! ```toml
//! total_power = 1e-3
//! pas_per_waveguide = 8
//!
//! [scenario]
//! preset = "fig5"          # start from a built-in sweep
//! values = [2, 4, 8]
//! architectures = ["wd", "wm"]
//! trials = 5
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::radiation::RadiationModel;

use super::scenario::{Architecture, Scenario, SweepVariable, UserDistribution};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ScenarioSpec {
    preset: Option<String>,
    name: Option<String>,
    sweep: Option<SweepVariable>,
    values: Option<Vec<f64>>,
    architectures: Option<Vec<Architecture>>,
    radiation_models: Option<Vec<RadiationModel>>,
    distribution: Option<UserDistribution>,
    trials: Option<usize>,
    seed: Option<u64>,
    random_init: Option<bool>,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str, default_name: &str) -> Result<Scenario> {
    let mut table: toml::Table = text.parse()?;
    let spec: ScenarioSpec = match table.remove("scenario") {
        Some(v) => v.try_into()?,
        None => ScenarioSpec::default(),
    };
    let base: SystemConfig = toml::Value::Table(table).try_into()?;

    let mut s = match &spec.preset {
        Some(p) => {
            Scenario::preset(p).ok_or_else(|| Error::Config(format!("unknown preset '{p}'")))?
        }
        None => Scenario {
            name: default_name.to_string(),
            sweep: SweepVariable::Power,
            values: vec![0.0],
            architectures: Architecture::ALL.to_vec(),
            radiation_models: vec![RadiationModel::Proportional],
            distribution: UserDistribution::Uniform,
            trials: 20,
            seed: 2025,
            random_init: false,
            base: SystemConfig::default(),
        },
    };
    s.base = base;
    if let Some(v) = spec.name {
        s.name = v;
    }
    if let Some(v) = spec.sweep {
        s.sweep = v;
    }
    if let Some(v) = spec.values {
        s.values = v;
    }
    if let Some(v) = spec.architectures {
        s.architectures = v;
    }
    if let Some(v) = spec.radiation_models {
        s.radiation_models = v;
    }
    if let Some(v) = spec.distribution {
        s.distribution = v;
    }
    if let Some(v) = spec.trials {
        s.trials = v;
    }
    if let Some(v) = spec.seed {
        s.seed = v;
    }
    if let Some(v) = spec.random_init {
        s.random_init = v;
    }
    s.validate()?;
    Ok(s)
}

/// Reads a scenario file; the file stem names it unless the file says otherwise.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("custom");
    parse_scenario(&text, stem)
}
