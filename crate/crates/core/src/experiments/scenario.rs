use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{dbm_to_watts, SystemConfig};
use crate::error::{Error, Result};
use crate::radiation::RadiationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Transmit power in dBm.
    Power,
    NumPas,
    NumUsers,
    /// Groups and waveguides together.
    NumGroups,
    RegionX,
    /// Alternating rounds; one solve per trial, read off the trace.
    Iterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "wd")]
    Wd,
    #[serde(rename = "wm")]
    Wm,
    #[serde(rename = "conv")]
    Conventional,
    #[serde(rename = "massive")]
    Massive,
}

impl Architecture {
    pub const ALL: [Architecture; 4] = [Self::Wd, Self::Wm, Self::Conventional, Self::Massive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Wd => "wd",
            Self::Wm => "wm",
            Self::Conventional => "conv",
            Self::Massive => "massive",
        }
    }

    /// Whether the architecture has pinching antennas (and hence a radiation model).
    pub fn is_pinching(&self) -> bool {
        matches!(self, Self::Wd | Self::Wm)
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown architecture '{s}' (expected wd, wm, conv, massive)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserDistribution {
    Uniform,
    /// Group `g` confined to the `g`-th of `G` equal slabs along `x`.
    GeographicallySeparated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    pub architectures: Vec<Architecture>,
    pub radiation_models: Vec<RadiationModel>,
    pub distribution: UserDistribution,
    pub trials: usize,
    pub seed: u64,
    /// Start the pinching solvers from random layouts and beamformers.
    pub random_init: bool,
    pub base: SystemConfig,
}

pub const PRESET_NAMES: [&str; 7] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

impl Scenario {
    fn preset_base(name: &str, sweep: SweepVariable, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            sweep,
            values,
            architectures: Architecture::ALL.to_vec(),
            radiation_models: vec![RadiationModel::Proportional],
            distribution: UserDistribution::Uniform,
            trials: 20,
            seed: 2025,
            random_init: false,
            base: SystemConfig::default(),
        }
    }

    /// Built-in sweeps for the standard 4-waveguide, 8-antenna setup.
    pub fn preset(name: &str) -> Option<Self> {
        use SweepVariable::*;
        let s = match name {
            "fig3" => Self {
                architectures: vec![Architecture::Wd, Architecture::Wm],
                random_init: true,
                ..Self::preset_base(name, Iterations, (0..=30).map(f64::from).collect())
            },
            "fig4" => Self {
                radiation_models: vec![RadiationModel::Equal, RadiationModel::Proportional],
                ..Self::preset_base(name, Power, vec![-10.0, -5.0, 0.0, 5.0, 10.0])
            },
            "fig5" => Self::preset_base(name, NumPas, vec![2.0, 4.0, 8.0, 12.0, 16.0]),
            "fig6" => Self::preset_base(name, NumUsers, vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            "fig7" => Self::preset_base(name, NumGroups, vec![2.0, 3.0, 4.0, 5.0, 6.0]),
            "fig8" => Self::preset_base(name, RegionX, vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]),
            "fig9" => Self {
                distribution: UserDistribution::GeographicallySeparated,
                ..Self::preset_base(name, RegionX, vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
            },
            _ => return None,
        };
        Some(s)
    }

    pub fn presets() -> Vec<Self> {
        PRESET_NAMES
            .iter()
            .filter_map(|n| Self::preset(n))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config(format!(
                "scenario '{}' has no sweep values",
                self.name
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) || self.values.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Config(
                "sweep values must be finite and sorted".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.architectures.is_empty() {
            return Err(Error::Config("no architectures selected".into()));
        }
        if self.architectures.iter().any(Architecture::is_pinching)
            && self.radiation_models.is_empty()
        {
            return Err(Error::Config("no radiation model selected".into()));
        }
        for &v in &self.values {
            self.config_for(v)?.validate()?;
        }
        Ok(())
    }

    /// System configuration at one sweep point.
    pub fn config_for(&self, value: f64) -> Result<SystemConfig> {
        let mut cfg = self.base.clone();
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!(
                    "sweep value {value} is not a positive count"
                )))
            }
        };
        match self.sweep {
            SweepVariable::Power => cfg.total_power = dbm_to_watts(value),
            SweepVariable::NumPas => cfg.pas_per_waveguide = count()?,
            SweepVariable::NumUsers => {
                let (g, k) = (cfg.num_groups, count()?);
                cfg = cfg.with_groups(g, k);
            }
            SweepVariable::NumGroups => {
                let g = count()?;
                let k = cfg.users_per_group.first().copied().unwrap_or(1);
                cfg.num_waveguides = g;
                cfg = cfg.with_groups(g, k);
            }
            SweepVariable::RegionX => cfg.region_x = value,
            SweepVariable::Iterations => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "iteration count {value} is not a whole number"
                    )));
                }
            }
        }
        Ok(cfg)
    }
}
