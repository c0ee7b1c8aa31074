//! Line-of-sight channels from radiating elements to users, and the effective
//! per-waveguide channels that fold in the in-waveguide response.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::layout::{Grid, PinchLayout};
use crate::radiation::RadiationProfile;

/// Users on the ground plane, partitioned into multicast groups.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    positions: Vec<[f64; 3]>,
    group_of: Vec<usize>,
    noise: Vec<f64>,
    members: Vec<Vec<usize>>,
}

impl UserSet {
    pub fn new(positions: Vec<[f64; 3]>, group_of: Vec<usize>, noise: Vec<f64>) -> Result<Self> {
        if positions.len() != group_of.len() || positions.len() != noise.len() {
            return Err(Error::Dimension(
                "positions, groups and noise must have equal length".into(),
            ));
        }
        let groups = group_of.iter().max().map_or(0, |g| g + 1);
        let mut members = vec![Vec::new(); groups];
        for (u, &g) in group_of.iter().enumerate() {
            members[g].push(u);
        }
        if let Some(g) = members.iter().position(Vec::is_empty) {
            return Err(Error::Input(format!("group {g} has no users")));
        }
        if let Some(u) = noise.iter().position(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::Input(format!("noise power of user {u} is invalid")));
        }
        Ok(Self {
            positions,
            group_of,
            noise,
            members,
        })
    }

    /// Users listed group by group with a common noise power.
    pub fn grouped(groups: Vec<Vec<[f64; 3]>>, noise_power: f64) -> Result<Self> {
        let mut positions = Vec::new();
        let mut group_of = Vec::new();
        for (g, users) in groups.into_iter().enumerate() {
            group_of.extend(std::iter::repeat_n(g, users.len()));
            positions.extend(users);
        }
        let noise = vec![noise_power; positions.len()];
        Self::new(positions, group_of, noise)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn num_groups(&self) -> usize {
        self.members.len()
    }

    pub fn position(&self, u: usize) -> [f64; 3] {
        self.positions[u]
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn group_of(&self, u: usize) -> usize {
        self.group_of[u]
    }

    pub fn members(&self, g: usize) -> &[usize] {
        &self.members[g]
    }

    pub fn noise(&self, u: usize) -> f64 {
        self.noise[u]
    }

    pub fn noise_powers(&self) -> &[f64] {
        &self.noise
    }

    /// Check that every user lies inside the service region.
    pub fn check_region(&self, region_x: f64, region_y: f64) -> Result<()> {
        for (u, p) in self.positions.iter().enumerate() {
            if p[0] < 0.0 || p[0] > region_x || p[1] < 0.0 || p[1] > region_y || p[2] != 0.0 {
                return Err(Error::Input(format!(
                    "user {u} at {p:?} lies outside the region"
                )));
            }
        }
        Ok(())
    }
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Spherical-wave coefficient `sqrt(eta) exp(-j k0 d) / d`.
#[inline]
pub(crate) fn los_coefficient(d: f64, sqrt_eta: f64, k0: f64) -> Complex64 {
    Complex64::from_polar(sqrt_eta / d, -k0 * d)
}

/// Free-space channel from each element to one user.
pub fn free_space_channel(
    user: [f64; 3],
    elements: &[[f64; 3]],
    wavelength: f64,
) -> Result<Vec<Complex64>> {
    let k0 = 2.0 * std::f64::consts::PI / wavelength;
    let sqrt_eta = wavelength / (4.0 * std::f64::consts::PI);
    elements
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let d = distance(user, e);
            if d <= 0.0 {
                return Err(Error::Singularity {
                    user: 0,
                    element: i,
                });
            }
            Ok(los_coefficient(d, sqrt_eta, k0))
        })
        .collect()
}

/// In-waveguide response `sqrt(P_n) exp(-j k_g x_n)` for one waveguide.
pub fn waveguide_response(
    positions: &[f64],
    powers: &[f64],
    guided_wavenumber: f64,
) -> Result<Vec<Complex64>> {
    if positions.len() != powers.len() {
        return Err(Error::Dimension(
            "positions and powers differ in length".into(),
        ));
    }
    Ok(positions
        .iter()
        .zip(powers)
        .map(|(&x, &p)| Complex64::from_polar(p.sqrt(), -guided_wavenumber * x))
        .collect())
}

/// Effective channels: row `u` holds the user's channel to each RF feed.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub hhat: DMatrix<Complex64>,
}

impl EffectiveChannels {
    pub fn new(hhat: DMatrix<Complex64>) -> Self {
        Self { hhat }
    }

    pub fn num_users(&self) -> usize {
        self.hhat.nrows()
    }

    pub fn num_feeds(&self) -> usize {
        self.hhat.ncols()
    }

    pub fn get(&self, u: usize, m: usize) -> Complex64 {
        self.hhat[(u, m)]
    }

    /// Channels scaled by a real factor (e.g. to normalise the power budget).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            hhat: self.hhat.map(|c| c * factor),
        }
    }
}

/// Per-waveguide inner products `h_u(x_m)^T psi(x_m)` for every user.
pub fn effective_channels(
    layout: &PinchLayout,
    profile: &RadiationProfile,
    users: &UserSet,
    cfg: &SystemConfig,
) -> Result<EffectiveChannels> {
    let m_count = layout.num_waveguides();
    if profile.rows.len() != m_count {
        return Err(Error::Dimension(
            "profile and layout disagree on waveguide count".into(),
        ));
    }
    let lambda = cfg.wavelength();
    let kg = cfg.guided_wavenumber();
    let mut hhat = DMatrix::zeros(users.len(), m_count);
    for m in 0..m_count {
        let xs = layout.positions(m);
        let psi = waveguide_response(&xs, &profile.rows[m].power, kg)?;
        let elements: Vec<[f64; 3]> = (0..xs.len()).map(|n| layout.pa_position(m, n)).collect();
        for u in 0..users.len() {
            let h =
                free_space_channel(users.position(u), &elements, lambda).map_err(|e| match e {
                    Error::Singularity { element, .. } => Error::Singularity { user: u, element },
                    other => other,
                })?;
            hhat[(u, m)] = h.iter().zip(&psi).map(|(a, b)| a * b).sum();
        }
    }
    Ok(EffectiveChannels { hhat })
}

/// Precomputed channel atoms `sqrt(eta) e^{-j k0 d}/d * e^{-j k_g x}` for every
/// (user, waveguide, grid point).
///
/// An on-grid layout's effective channel is then
/// `hhat[u, m] = sum_n sqrt(P_mn) * atom(u, m, idx_mn)`.
#[derive(Debug, Clone)]
pub struct ChannelAtlas {
    users: usize,
    waveguides: usize,
    grid_len: usize,
    atoms: Vec<Complex64>,
}

impl ChannelAtlas {
    pub fn build(cfg: &SystemConfig, users: &UserSet) -> Result<Self> {
        let grid = Grid::from_config(cfg)?;
        let k0 = cfg.free_space_wavenumber();
        let kg = cfg.guided_wavenumber();
        let sqrt_eta = cfg.eta().sqrt();
        let (k, m_count, l) = (users.len(), cfg.num_waveguides, grid.len());
        let mut atoms = Vec::with_capacity(k * m_count * l);
        let feed_phase: Vec<Complex64> = (0..l)
            .map(|i| Complex64::from_polar(1.0, -kg * grid.point(i)))
            .collect();
        for u in 0..k {
            let pos = users.position(u);
            for m in 0..m_count {
                let y = cfg.waveguide_y(m);
                for (i, phase) in feed_phase.iter().enumerate() {
                    let d = distance(pos, [grid.point(i), y, cfg.waveguide_height]);
                    if d <= 0.0 {
                        return Err(Error::Singularity {
                            user: u,
                            element: i,
                        });
                    }
                    atoms.push(los_coefficient(d, sqrt_eta, k0) * phase);
                }
            }
        }
        Ok(Self {
            users: k,
            waveguides: m_count,
            grid_len: l,
            atoms,
        })
    }

    pub fn num_users(&self) -> usize {
        self.users
    }

    pub fn num_waveguides(&self) -> usize {
        self.waveguides
    }

    #[inline]
    pub fn row(&self, u: usize, m: usize) -> &[Complex64] {
        let start = (u * self.waveguides + m) * self.grid_len;
        &self.atoms[start..start + self.grid_len]
    }

    /// `sum_n amp_n * atom(u, m, idx_n)`.
    #[inline]
    pub fn waveguide_gain(
        &self,
        u: usize,
        m: usize,
        indices: &[usize],
        amplitudes: &[f64],
    ) -> Complex64 {
        let row = self.row(u, m);
        indices
            .iter()
            .zip(amplitudes)
            .map(|(&i, &a)| row[i] * a)
            .sum()
    }

    /// Effective channels of an on-grid layout given per-waveguide amplitudes.
    pub fn effective(&self, layout: &PinchLayout, amplitudes: &[Vec<f64>]) -> EffectiveChannels {
        let mut hhat = DMatrix::zeros(self.users, self.waveguides);
        for u in 0..self.users {
            for m in 0..self.waveguides {
                hhat[(u, m)] = self.waveguide_gain(u, m, layout.indices(m), &amplitudes[m]);
            }
        }
        EffectiveChannels { hhat }
    }
}
