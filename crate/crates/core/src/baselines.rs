//! Fixed-location, fully digital antenna arrays used as reference points.

use nalgebra::DMatrix;

use crate::channel::{free_space_channel, EffectiveChannels, UserSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rates::Beamformer;
use crate::wm::{mm_beamforming, MmOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrayKind {
    /// `N` elements spaced like the waveguides.
    Conventional,
    /// `M N` elements at half-wavelength spacing.
    Massive,
}

/// Uniform linear array along `y`, centred at `[D_x/2, 0, h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedArray {
    pub kind: ArrayKind,
    pub elements: Vec<[f64; 3]>,
}

impl FixedArray {
    pub fn new(kind: ArrayKind, cfg: &SystemConfig) -> Self {
        let (count, spacing) = match kind {
            ArrayKind::Conventional => (cfg.pas_per_waveguide, cfg.waveguide_spacing()),
            ArrayKind::Massive => (
                cfg.num_waveguides * cfg.pas_per_waveguide,
                cfg.wavelength() / 2.0,
            ),
        };
        let centre = (count as f64 - 1.0) / 2.0;
        let elements = (0..count)
            .map(|i| {
                [
                    cfg.region_x / 2.0,
                    (i as f64 - centre) * spacing,
                    cfg.waveguide_height,
                ]
            })
            .collect();
        Self { kind, elements }
    }

    pub fn conventional(cfg: &SystemConfig) -> Self {
        Self::new(ArrayKind::Conventional, cfg)
    }

    pub fn massive(cfg: &SystemConfig) -> Self {
        Self::new(ArrayKind::Massive, cfg)
    }

    /// One RF chain per element.
    pub fn num_rf(&self) -> usize {
        self.elements.len()
    }
}

/// Per-user free-space channels to every array element.
pub fn fixed_array_channels(
    array: &FixedArray,
    users: &UserSet,
    cfg: &SystemConfig,
) -> Result<EffectiveChannels> {
    let mut h = DMatrix::zeros(users.len(), array.num_rf());
    for u in 0..users.len() {
        let row = free_space_channel(users.position(u), &array.elements, cfg.wavelength())
            .map_err(|e| match e {
                Error::Singularity { element, .. } => Error::Singularity { user: u, element },
                other => other,
            })?;
        for (e, c) in row.into_iter().enumerate() {
            h[(u, e)] = c;
        }
    }
    Ok(EffectiveChannels::new(h))
}

/// Max-min multicast beamforming on fixed channels with the full budget,
/// started from group-matched columns.
pub fn baseline_multicast_solve(
    h: &EffectiveChannels,
    users: &UserSet,
    cfg: &SystemConfig,
) -> Result<MmOutcome> {
    let start = Beamformer::group_matched(h, users, cfg.total_power);
    mm_beamforming(h, users, cfg.total_power, cfg, start)
}
