//! Power radiation along a waveguide.
//!
//! Antenna `n` on a waveguide radiates `P_n = (P - sum_{j<n} P_j) * kappa_n * a_n`
//! of the residual guided power, where `kappa_n` is the in-waveguide loss from
//! the previous antenna (the feed point for `n = 1`) and `a_n` the radiation
//! coefficient. Two coefficient models are supported:
//!
//! * [`RadiationModel::Equal`]: every antenna radiates `P_L / N`.
//! * [`RadiationModel::Proportional`]: a common coefficient `a` solved so the
//!   antennas radiate `P_L` in total.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::layout::PinchLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiationModel {
    Equal,
    Proportional,
}

impl RadiationModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RadiationModel::Equal => "equal",
            RadiationModel::Proportional => "proportional",
        }
    }
}

impl fmt::Display for RadiationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RadiationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equal" => Ok(RadiationModel::Equal),
            "proportional" => Ok(RadiationModel::Proportional),
            other => Err(Error::Config(format!("unknown radiation model '{other}'"))),
        }
    }
}

/// Physical status of a computed radiation row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiationStatus {
    Feasible,
    /// Some equal-model coefficient exceeds one.
    Infeasible,
    /// Even `a = 1` radiates less than the requested power.
    Shortfall,
}

/// Radiation of the antennas on a single waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationRow {
    pub power: Vec<f64>,
    pub coefficient: Vec<f64>,
    pub loss: Vec<f64>,
    pub status: RadiationStatus,
}

impl RadiationRow {
    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.status == RadiationStatus::Feasible
    }
}

/// Radiation rows for every waveguide of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationProfile {
    pub model: RadiationModel,
    pub rows: Vec<RadiationRow>,
}

impl RadiationProfile {
    pub fn is_feasible(&self) -> bool {
        self.rows.iter().all(RadiationRow::is_feasible)
    }
}

/// In-waveguide power loss between two points, `10^(-eps (x_curr - x_prev) / 10)`.
pub fn in_waveguide_loss(x_prev: f64, x_curr: f64, attenuation_db_per_m: f64) -> Result<f64> {
    let gap = x_curr - x_prev;
    if !(gap >= 0.0) || x_prev < 0.0 {
        return Err(Error::Input(format!(
            "loss needs 0 <= x_prev <= x_curr (got {x_prev}, {x_curr})"
        )));
    }
    Ok(10f64.powf(-attenuation_db_per_m * gap / 10.0))
}

fn losses(positions: &[f64], attenuation: f64) -> Result<Vec<f64>> {
    let mut prev = 0.0;
    positions
        .iter()
        .map(|&x| {
            let k = in_waveguide_loss(prev, x, attenuation)?;
            prev = x;
            Ok(k)
        })
        .collect()
}

fn check_powers(feed_power: f64, radiated_power: f64) -> Result<()> {
    if !(radiated_power > 0.0 && radiated_power <= feed_power) {
        return Err(Error::Input(format!(
            "radiated power must lie in (0, feed power]: {radiated_power} vs {feed_power}"
        )));
    }
    Ok(())
}

/// Equal-power model: each antenna radiates `P_L / N`.
pub fn radiation_equal(
    feed_power: f64,
    radiated_power: f64,
    positions: &[f64],
    attenuation_db_per_m: f64,
) -> Result<RadiationRow> {
    check_powers(feed_power, radiated_power)?;
    let loss = losses(positions, attenuation_db_per_m)?;
    let n = positions.len() as f64;
    let coefficient: Vec<f64> = loss
        .iter()
        .enumerate()
        .map(|(i, &k)| radiated_power / ((n * feed_power - i as f64 * radiated_power) * k))
        .collect();
    let status = if coefficient.iter().any(|&a| a > 1.0) {
        RadiationStatus::Infeasible
    } else {
        RadiationStatus::Feasible
    };
    Ok(RadiationRow {
        power: vec![radiated_power / n; positions.len()],
        coefficient,
        loss,
        status,
    })
}

/// Fraction of the fed power radiated with common coefficient `a`:
/// `1 - prod_n (1 - kappa_n a)`.
fn radiated_share(loss: &[f64], a: f64) -> f64 {
    1.0 - loss.iter().map(|&k| 1.0 - k * a).product::<f64>()
}

/// Solve `1 - prod(1 - kappa_n a) = share` for `a` in `(0, 1]` by bisection.
///
/// Returns `None` when `a = 1` still falls short.
fn solve_common_coefficient(loss: &[f64], share: f64) -> Option<f64> {
    if radiated_share(loss, 1.0) < share {
        return None;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // Bisect until the bracket stops shrinking in floating point.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if radiated_share(loss, mid) < share {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let err = |a: f64| (radiated_share(loss, a) - share).abs();
    Some(if err(lo) < err(hi) { lo } else { hi })
}

fn proportional_powers(feed_power: f64, loss: &[f64], a: f64) -> Vec<f64> {
    let mut residual = feed_power;
    loss.iter()
        .map(|&k| {
            let p = residual * k * a;
            residual -= p;
            p
        })
        .collect()
}

/// Proportional model: common coefficient `a` with total radiated power `P_L`.
pub fn radiation_proportional(
    feed_power: f64,
    radiated_power: f64,
    positions: &[f64],
    attenuation_db_per_m: f64,
) -> Result<RadiationRow> {
    check_powers(feed_power, radiated_power)?;
    let loss = losses(positions, attenuation_db_per_m)?;
    let (a, status) = match solve_common_coefficient(&loss, radiated_power / feed_power) {
        Some(a) => (a, RadiationStatus::Feasible),
        None => (1.0, RadiationStatus::Shortfall),
    };
    Ok(RadiationRow {
        power: proportional_powers(feed_power, &loss, a),
        coefficient: vec![a; positions.len()],
        loss,
        status,
    })
}

pub fn radiation_row(
    model: RadiationModel,
    feed_power: f64,
    radiated_power: f64,
    positions: &[f64],
    attenuation_db_per_m: f64,
) -> Result<RadiationRow> {
    match model {
        RadiationModel::Equal => {
            radiation_equal(feed_power, radiated_power, positions, attenuation_db_per_m)
        }
        RadiationModel::Proportional => {
            radiation_proportional(feed_power, radiated_power, positions, attenuation_db_per_m)
        }
    }
}

/// Radiation profile of a layout per unit fed power.
///
/// The transmit beamformer carries the actual feed amplitudes, so the in-waveguide
/// response is normalised to `P_m = 1` and radiates `radiated_fraction` of it.
pub fn radiation_profile(layout: &PinchLayout, cfg: &SystemConfig) -> Result<RadiationProfile> {
    let rows = (0..layout.num_waveguides())
        .map(|m| {
            radiation_row(
                cfg.radiation_model,
                1.0,
                cfg.radiated_fraction,
                &layout.positions(m),
                cfg.attenuation_db_per_m,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadiationProfile {
        model: cfg.radiation_model,
        rows,
    })
}

/// Fast per-unit-feed amplitudes `sqrt(P_n)` for on-grid layouts.
///
/// Loss factors are tabulated by grid-index gap, so evaluating a candidate row
/// needs no transcendental calls.
#[derive(Debug, Clone)]
pub(crate) struct AmplitudeKernel {
    model: RadiationModel,
    fraction: f64,
    loss_by_gap: Vec<f64>,
}

impl AmplitudeKernel {
    pub(crate) fn new(cfg: &SystemConfig) -> Self {
        let step = cfg.region_x / (cfg.grid_size - 1) as f64;
        let loss_by_gap = (0..cfg.grid_size)
            .map(|d| 10f64.powf(-cfg.attenuation_db_per_m * d as f64 * step / 10.0))
            .collect();
        Self {
            model: cfg.radiation_model,
            fraction: cfg.radiated_fraction,
            loss_by_gap,
        }
    }

    /// Write `sqrt(P_n)` for the sorted grid indices into `out`; returns the status.
    pub(crate) fn amplitudes(&self, indices: &[usize], out: &mut [f64]) -> RadiationStatus {
        let n = indices.len();
        match self.model {
            RadiationModel::Equal => {
                let amp = (self.fraction / n as f64).sqrt();
                out[..n].fill(amp);
                let mut prev = 0;
                let mut status = RadiationStatus::Feasible;
                for (i, &idx) in indices.iter().enumerate() {
                    let k = self.loss_by_gap[idx - prev];
                    prev = idx;
                    let a = self.fraction / ((n as f64 - i as f64 * self.fraction) * k);
                    if a > 1.0 {
                        status = RadiationStatus::Infeasible;
                    }
                }
                status
            }
            RadiationModel::Proportional => {
                let mut loss = [0.0; 64];
                let mut heap;
                let loss: &mut [f64] = if n <= loss.len() {
                    &mut loss[..n]
                } else {
                    heap = vec![0.0; n];
                    &mut heap
                };
                let mut prev = 0;
                for (slot, &idx) in loss.iter_mut().zip(indices) {
                    *slot = self.loss_by_gap[idx - prev];
                    prev = idx;
                }
                let (a, status) = match solve_common_coefficient(loss, self.fraction) {
                    Some(a) => (a, RadiationStatus::Feasible),
                    None => (1.0, RadiationStatus::Shortfall),
                };
                let mut residual = 1.0;
                for (o, &k) in out.iter_mut().zip(loss.iter()) {
                    let p = residual * k * a;
                    residual -= p;
                    *o = p.sqrt();
                }
                status
            }
        }
    }

    /// Whether a row with this status may be used by an optimizer.
    pub(crate) fn admissible(status: RadiationStatus, reject_infeasible: bool) -> bool {
        !(reject_infeasible && status == RadiationStatus::Infeasible)
    }
}
