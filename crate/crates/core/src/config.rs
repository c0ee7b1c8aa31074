//! Physical and algorithmic constants of a pinching-antenna deployment.
//!
//! All quantities are SI: hertz, metres, watts. Use [`dbm_to_watts`] when
//! reading powers quoted in dBm.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radiation::RadiationModel;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `P[W] = 10^((dBm - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub carrier_frequency: f64,
    pub light_speed: f64,
    /// Effective refractive index of the dielectric waveguide.
    pub effective_refractive_index: f64,
    pub waveguide_height: f64,
    pub region_x: f64,
    pub region_y: f64,
    pub num_waveguides: usize,
    pub pas_per_waveguide: usize,
    pub num_groups: usize,
    /// Users in each group; length must equal `num_groups`.
    pub users_per_group: Vec<usize>,
    /// Total transmit power budget `P_t`, watts.
    pub total_power: f64,
    /// Ratio of radiated to fed power on every waveguide, `P_L,m / P_m`.
    pub radiated_fraction: f64,
    /// In-waveguide attenuation, dB/m.
    pub attenuation_db_per_m: f64,
    /// Number of candidate positions along each waveguide.
    pub grid_size: usize,
    /// Per-user noise power, watts.
    pub noise_power: f64,
    pub radiation_model: RadiationModel,
    /// Skip layouts whose equal-power radiation coefficients exceed one.
    pub reject_infeasible_radiation: bool,
    /// Log-sum-exp smoothing parameter.
    pub smoothing: f64,
    pub steps: StepConstants,
    pub tolerance: f64,
    pub max_ao_rounds: usize,
    pub max_pgd_iterations: usize,
    pub max_pagd_iterations: usize,
}

/// Step-size constants of the dual (PAGD) updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepConstants {
    pub rho_c: f64,
    pub rho_mu: f64,
    pub rho_p: f64,
    pub rho_t: f64,
    pub rho_eta: f64,
}

impl Default for StepConstants {
    fn default() -> Self {
        Self {
            rho_c: 1.0,
            rho_mu: 0.02,
            rho_p: 1.0,
            rho_t: 10.0,
            rho_eta: 0.01,
        }
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            carrier_frequency: 28e9,
            light_speed: SPEED_OF_LIGHT,
            effective_refractive_index: 1.44,
            waveguide_height: 5.0,
            region_x: 10.0,
            region_y: 6.0,
            num_waveguides: 4,
            pas_per_waveguide: 8,
            num_groups: 4,
            users_per_group: vec![3; 4],
            total_power: dbm_to_watts(0.0),
            radiated_fraction: 0.9,
            attenuation_db_per_m: 0.1,
            grid_size: 1000,
            noise_power: dbm_to_watts(-90.0),
            radiation_model: RadiationModel::Proportional,
            reject_infeasible_radiation: true,
            smoothing: 100.0,
            steps: StepConstants::default(),
            tolerance: 1e-4,
            max_ao_rounds: 200,
            max_pgd_iterations: 500,
            max_pagd_iterations: 500,
        }
    }
}

impl SystemConfig {
    /// Free-space wavelength `c / f_c`.
    pub fn wavelength(&self) -> f64 {
        self.light_speed / self.carrier_frequency
    }

    pub fn guided_wavelength(&self) -> f64 {
        self.wavelength() / self.effective_refractive_index
    }

    pub fn free_space_wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    pub fn guided_wavenumber(&self) -> f64 {
        2.0 * PI / self.guided_wavelength()
    }

    /// Free-space path-gain constant `c^2 / (16 pi^2 f_c^2)`.
    pub fn eta(&self) -> f64 {
        let c = self.light_speed;
        let f = self.carrier_frequency;
        c * c / (16.0 * PI * PI * f * f)
    }

    /// Minimum inter-antenna spacing, half a free-space wavelength.
    pub fn min_spacing(&self) -> f64 {
        self.wavelength() / 2.0
    }

    pub fn total_users(&self) -> usize {
        self.users_per_group.iter().sum()
    }

    /// y-coordinate of waveguide `m`, evenly spaced across `[0, D_y]`.
    ///
    /// A single waveguide runs along the middle of the region.
    pub fn waveguide_y(&self, m: usize) -> f64 {
        if self.num_waveguides <= 1 {
            self.region_y / 2.0
        } else {
            m as f64 * self.region_y / (self.num_waveguides - 1) as f64
        }
    }

    /// Waveguide spacing `d_y` (zero for a single waveguide).
    pub fn waveguide_spacing(&self) -> f64 {
        if self.num_waveguides <= 1 {
            0.0
        } else {
            self.region_y / (self.num_waveguides - 1) as f64
        }
    }

    /// Builder-style helper: set `G` groups of `K` users each.
    pub fn with_groups(mut self, groups: usize, users_each: usize) -> Self {
        self.num_groups = groups;
        self.users_per_group = vec![users_each; groups];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency", self.carrier_frequency),
            ("light_speed", self.light_speed),
            (
                "effective_refractive_index",
                self.effective_refractive_index,
            ),
            ("waveguide_height", self.waveguide_height),
            ("region_x", self.region_x),
            ("region_y", self.region_y),
            ("total_power", self.total_power),
            ("noise_power", self.noise_power),
            ("smoothing", self.smoothing),
            ("tolerance", self.tolerance),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.num_waveguides == 0 || self.pas_per_waveguide == 0 || self.num_groups == 0 {
            return Err(Error::Config(
                "num_waveguides, pas_per_waveguide and num_groups must be at least 1".into(),
            ));
        }
        if self.num_waveguides < self.num_groups {
            return Err(Error::Config(format!(
                "need at least as many waveguides as groups ({} < {})",
                self.num_waveguides, self.num_groups
            )));
        }
        if self.users_per_group.len() != self.num_groups {
            return Err(Error::Config(format!(
                "users_per_group has {} entries for {} groups",
                self.users_per_group.len(),
                self.num_groups
            )));
        }
        if self.users_per_group.contains(&0) {
            return Err(Error::Config("every group needs at least one user".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::Config("grid_size must be at least 2".into()));
        }
        if !(self.radiated_fraction > 0.0 && self.radiated_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "radiated_fraction must lie in (0, 1], got {}",
                self.radiated_fraction
            )));
        }
        if !(self.attenuation_db_per_m >= 0.0 && self.attenuation_db_per_m.is_finite()) {
            return Err(Error::Config(
                "attenuation_db_per_m must be non-negative".into(),
            ));
        }
        let s = self.steps;
        if [s.rho_c, s.rho_mu, s.rho_p, s.rho_t, s.rho_eta]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::Config("step constants must be positive".into()));
        }
        let step = self.region_x / (self.grid_size - 1) as f64;
        let needed = (self.pas_per_waveguide.saturating_sub(1)) as f64 * self.min_spacing();
        if needed > self.region_x {
            return Err(Error::Config(format!(
                "{} antennas at spacing {:.4} m do not fit in {} m",
                self.pas_per_waveguide,
                self.min_spacing(),
                self.region_x
            )));
        }
        if step <= 0.0 {
            return Err(Error::Config("degenerate grid".into()));
        }
        Ok(())
    }

    /// Require the waveguide-division pairing `M = G`.
    pub fn require_division(&self) -> Result<()> {
        if self.num_waveguides != self.num_groups {
            return Err(Error::Config(format!(
                "waveguide division needs one waveguide per group (M = {}, G = {})",
                self.num_waveguides, self.num_groups
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let cfg = SystemConfig::default();
        let lambda = SPEED_OF_LIGHT / 28e9;
        assert!((cfg.wavelength() - lambda).abs() < 1e-15);
        assert!((cfg.guided_wavelength() - lambda / 1.44).abs() < 1e-15);
        assert!((cfg.eta().sqrt() - lambda / (4.0 * PI)).abs() < 1e-15);
        assert!((cfg.min_spacing() - 0.005353).abs() < 1e-5);
        cfg.validate().unwrap();
    }

    #[test]
    fn dbm_conversion() {
        assert!((dbm_to_watts(-90.0) - 1e-12).abs() < 1e-24);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-15);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
    }

    #[test]
    fn waveguide_positions() {
        let cfg = SystemConfig::default();
        assert_eq!(cfg.waveguide_y(0), 0.0);
        assert!((cfg.waveguide_y(3) - 6.0).abs() < 1e-12);
        assert!((cfg.waveguide_spacing() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = SystemConfig::default();
        cfg.grid_size = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = SystemConfig::default();
        cfg.num_waveguides = 2;
        assert!(cfg.validate().is_err());

        let mut cfg = SystemConfig::default();
        cfg.radiated_fraction = 1.5;
        assert!(cfg.validate().is_err());

        let mut cfg = SystemConfig::default();
        cfg.users_per_group = vec![3; 3];
        assert!(cfg.validate().is_err());
    }
}
