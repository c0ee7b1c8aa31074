//! Single-antenna placement under the surrogate objective.
//!
//! Moving antenna `(m, n)` only changes column `m` of the effective channel,
//! so each user's amplitudes split into a fixed part `S_{u,i}` from the other
//! waveguides plus `z_u(x) w_{m,i}`, where `z_u(x)` is the new waveguide-`m`
//! channel.

use num_complex::Complex64;

use crate::channel::{ChannelAtlas, EffectiveChannels, UserSet};
use crate::layout::PinchLayout;
use crate::radiation::AmplitudeKernel;
use crate::rates::Beamformer;

use super::surrogate::SurrogateCoeffs;

pub(crate) struct PlacementContext<'c> {
    m: usize,
    groups: usize,
    /// `S_{u,i}`, row-major by user.
    rest: Vec<Complex64>,
    /// Row `m` of the beamformer.
    w_m: Vec<Complex64>,
    coeffs: &'c SurrogateCoeffs,
    users: &'c UserSet,
}

impl<'c> PlacementContext<'c> {
    pub(crate) fn new(
        h: &EffectiveChannels,
        w: &Beamformer,
        m: usize,
        coeffs: &'c SurrogateCoeffs,
        users: &'c UserSet,
    ) -> Self {
        let (feeds, groups) = (w.num_feeds(), w.num_groups());
        let mut rest = vec![Complex64::new(0.0, 0.0); users.len() * groups];
        for u in 0..users.len() {
            for i in 0..groups {
                rest[u * groups + i] = (0..feeds)
                    .filter(|&j| j != m)
                    .map(|j| h.get(u, j) * w.w[(j, i)])
                    .sum();
            }
        }
        Self {
            m,
            groups,
            rest,
            w_m: (0..groups).map(|i| w.w[(m, i)]).collect(),
            coeffs,
            users,
        }
    }

    /// Surrogate max-min objective with waveguide `m` at grid indices `row`,
    /// or `None` if its radiation row is inadmissible.
    pub(crate) fn value(
        &self,
        atlas: &ChannelAtlas,
        kernel: &AmplitudeKernel,
        reject: bool,
        row: &[usize],
    ) -> Option<f64> {
        let mut amps = vec![0.0; row.len()];
        if !AmplitudeKernel::admissible(kernel.amplitudes(row, &mut amps), reject) {
            return None;
        }
        let mut total = 0.0;
        for g in 0..self.users.num_groups() {
            let mut worst = f64::INFINITY;
            for &u in self.users.members(g) {
                let z = atlas.waveguide_gain(u, self.m, row, &amps);
                let rest = &self.rest[u * self.groups..(u + 1) * self.groups];
                let mut received = 0.0;
                let mut own = Complex64::new(0.0, 0.0);
                for i in 0..self.groups {
                    let amp = rest[i] + z * self.w_m[i];
                    received += amp.norm_sqr();
                    if i == g {
                        own = amp;
                    }
                }
                let r = self.coeffs.constant[u] + 2.0 * (self.coeffs.a[u] * own).re
                    - self.coeffs.b[u] * received;
                worst = worst.min(r);
            }
            total += worst;
        }
        Some(total)
    }
}

/// Placement context for a layout (convenience for callers outside the AO loop).
pub(crate) fn context_for<'c>(
    atlas: &ChannelAtlas,
    kernel: &AmplitudeKernel,
    layout: &PinchLayout,
    w: &Beamformer,
    m: usize,
    coeffs: &'c SurrogateCoeffs,
    users: &'c UserSet,
) -> PlacementContext<'c> {
    let amps: Vec<Vec<f64>> = (0..layout.num_waveguides())
        .map(|j| {
            let mut a = vec![0.0; layout.pas_per_waveguide()];
            kernel.amplitudes(layout.indices(j), &mut a);
            a
        })
        .collect();
    PlacementContext::new(&atlas.effective(layout, &amps), w, m, coeffs, users)
}
