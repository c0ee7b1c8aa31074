//! SINR, multicast rates and the log-sum-exp smoothed objective.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::LN_2;

use crate::channel::{EffectiveChannels, UserSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamformerMode {
    /// One stream per waveguide: diagonal, real, non-negative.
    Division,
    /// Dense precoding across all feeds.
    Multiplexing,
}

/// Transmit beamformer `W` (feeds x groups).
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub w: DMatrix<Complex64>,
    pub mode: BeamformerMode,
}

impl Beamformer {
    /// `W = Diag(sqrt(P_g))`.
    pub fn diagonal(powers: &[f64]) -> Self {
        let g = powers.len();
        let mut w = DMatrix::zeros(g, g);
        for (i, &p) in powers.iter().enumerate() {
            w[(i, i)] = Complex64::new(p.max(0.0).sqrt(), 0.0);
        }
        Self {
            w,
            mode: BeamformerMode::Division,
        }
    }

    pub fn dense(w: DMatrix<Complex64>) -> Self {
        Self {
            w,
            mode: BeamformerMode::Multiplexing,
        }
    }

    pub fn zeros(feeds: usize, groups: usize) -> Self {
        Self::dense(DMatrix::zeros(feeds, groups))
    }

    pub fn num_feeds(&self) -> usize {
        self.w.nrows()
    }

    pub fn num_groups(&self) -> usize {
        self.w.ncols()
    }

    /// `Tr(W^H W)`.
    pub fn power(&self) -> f64 {
        self.w.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Column powers `||w_g||^2`.
    pub fn group_powers(&self) -> Vec<f64> {
        self.w
            .column_iter()
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            w: self.w.map(|c| c * factor),
            mode: self.mode,
        }
    }

    /// Frobenius distance to another beamformer.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.w - &other.w)
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Equal-power columns along the sum of each group's conjugate channels.
    pub fn group_matched(h: &EffectiveChannels, users: &UserSet, budget: f64) -> Self {
        let (feeds, groups) = (h.num_feeds(), users.num_groups());
        let mut w = DMatrix::zeros(feeds, groups);
        let per_group = (budget / groups as f64).sqrt();
        for g in 0..groups {
            let mut col = vec![Complex64::new(0.0, 0.0); feeds];
            for &u in users.members(g) {
                let norm = h
                    .hhat
                    .row(u)
                    .iter()
                    .map(|c| c.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if norm > 0.0 {
                    for (m, c) in col.iter_mut().enumerate() {
                        *c += h.get(u, m).conj() / norm;
                    }
                }
            }
            let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for (m, c) in col.iter().enumerate() {
                w[(m, g)] = if norm > 0.0 {
                    c * (per_group / norm)
                } else {
                    Complex64::new(per_group / (feeds as f64).sqrt(), 0.0)
                };
            }
        }
        Self::dense(w)
    }
}

/// Per-user link quality and the resulting multicast objective.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub sinr: Vec<f64>,
    /// bits/s/Hz
    pub rate: Vec<f64>,
    pub group_min: Vec<f64>,
    /// Sum over groups of the minimum member rate.
    pub objective: f64,
    /// `A = hhat^T w_g` for each user's own group.
    pub desired: Vec<Complex64>,
    /// Inter-group interference power.
    pub interference: Vec<f64>,
}

fn check_dims(w: &Beamformer, h: &EffectiveChannels, users: &UserSet) -> Result<()> {
    if h.num_feeds() != w.num_feeds() {
        return Err(Error::Dimension(format!(
            "channels have {} feeds, beamformer {}",
            h.num_feeds(),
            w.num_feeds()
        )));
    }
    if h.num_users() != users.len() || w.num_groups() != users.num_groups() {
        return Err(Error::Dimension(
            "users, channels and beamformer disagree".into(),
        ));
    }
    Ok(())
}

/// `hhat_u^T w_g`.
#[inline]
pub(crate) fn amplitude(
    h: &EffectiveChannels,
    u: usize,
    w: &DMatrix<Complex64>,
    g: usize,
) -> Complex64 {
    (0..w.nrows()).map(|m| h.hhat[(u, m)] * w[(m, g)]).sum()
}

/// Per-group minimum, ties broken by the lowest user index.
pub fn group_minima(rate: &[f64], users: &UserSet) -> Vec<f64> {
    (0..users.num_groups())
        .map(|g| {
            users
                .members(g)
                .iter()
                .map(|&u| rate[u])
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Index of the worst user in each group (lowest index on ties).
pub fn worst_users(rate: &[f64], users: &UserSet) -> Vec<usize> {
    (0..users.num_groups())
        .map(|g| {
            let mut best = users.members(g)[0];
            for &u in users.members(g) {
                if rate[u] < rate[best] {
                    best = u;
                }
            }
            best
        })
        .collect()
}

pub fn sinr_all(w: &Beamformer, h: &EffectiveChannels, users: &UserSet) -> Result<RateReport> {
    check_dims(w, h, users)?;
    let k = users.len();
    let mut sinr = Vec::with_capacity(k);
    let mut desired = Vec::with_capacity(k);
    let mut interference = Vec::with_capacity(k);
    for u in 0..k {
        let g = users.group_of(u);
        let a = amplitude(h, u, &w.w, g);
        let i: f64 = (0..w.num_groups())
            .filter(|&j| j != g)
            .map(|j| amplitude(h, u, &w.w, j).norm_sqr())
            .sum();
        let denom = i + users.noise(u);
        let signal = a.norm_sqr();
        let s = if denom > 0.0 {
            signal / denom
        } else if signal == 0.0 {
            0.0
        } else {
            return Err(Error::DivisionGuard(u));
        };
        sinr.push(s);
        desired.push(a);
        interference.push(i);
    }
    let rate: Vec<f64> = sinr.iter().map(|s| (1.0 + s).log2()).collect();
    let group_min = group_minima(&rate, users);
    Ok(RateReport {
        objective: group_min.iter().sum(),
        sinr,
        rate,
        group_min,
        desired,
        interference,
    })
}

/// Sum over groups of the minimum user rate.
pub fn objective(w: &Beamformer, h: &EffectiveChannels, users: &UserSet) -> Result<f64> {
    Ok(sinr_all(w, h, users)?.objective)
}

/// `-(1/tau) ln sum_k exp(-tau r_k)`, computed with a max shift.
pub fn soft_min(values: &[f64], tau: f64) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = values.iter().map(|&r| (-tau * (r - lo)).exp()).sum();
    lo - s.ln() / tau
}

/// Softmin weights `exp(-tau r_k) / sum_l exp(-tau r_l)`.
pub fn soft_min_weights(values: &[f64], tau: f64) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = values.iter().map(|&r| (-tau * (r - lo)).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Channel power gains `|hhat_{u,j}|^2` used by the division architecture.
fn gains(h: &EffectiveChannels) -> DMatrix<f64> {
    h.hhat.map(|c| c.norm_sqr())
}

/// Per-user rate under a diagonal power allocation, plus `I'` and SINR.
fn division_terms(gain: &DMatrix<f64>, p: &[f64], users: &UserSet) -> Vec<(f64, f64, f64)> {
    (0..users.len())
        .map(|u| {
            let g = users.group_of(u);
            let noise_plus: f64 = (0..p.len())
                .filter(|&j| j != g)
                .map(|j| gain[(u, j)] * p[j])
                .sum::<f64>()
                + users.noise(u);
            let sinr = gain[(u, g)] * p[g] / noise_plus;
            ((1.0 + sinr).log2(), noise_plus, sinr)
        })
        .collect()
}

fn check_power_vector(p: &[f64], h: &EffectiveChannels, users: &UserSet) -> Result<()> {
    if p.len() != users.num_groups() || h.num_feeds() != p.len() || h.num_users() != users.len() {
        return Err(Error::Dimension(
            "power vector, channels and groups disagree".into(),
        ));
    }
    Ok(())
}

/// Rates of every user under the diagonal allocation `p`.
pub fn division_rates(p: &[f64], h: &EffectiveChannels, users: &UserSet) -> Result<Vec<f64>> {
    check_power_vector(p, h, users)?;
    Ok(division_terms(&gains(h), p, users)
        .into_iter()
        .map(|t| t.0)
        .collect())
}

/// Smoothed objective `J = sum_g softmin_tau(R_{g,k})` for a diagonal allocation.
pub fn lse_value(p: &[f64], h: &EffectiveChannels, users: &UserSet, tau: f64) -> Result<f64> {
    let rates = division_rates(p, h, users)?;
    Ok((0..users.num_groups())
        .map(|g| {
            let r: Vec<f64> = users.members(g).iter().map(|&u| rates[u]).collect();
            soft_min(&r, tau)
        })
        .sum())
}

/// Gradient of [`lse_value`] with respect to the group powers.
pub fn lse_gradient(
    p: &[f64],
    h: &EffectiveChannels,
    users: &UserSet,
    tau: f64,
) -> Result<Vec<f64>> {
    check_power_vector(p, h, users)?;
    let gain = gains(h);
    let terms = division_terms(&gain, p, users);
    let mut grad = vec![0.0; p.len()];
    for g in 0..users.num_groups() {
        let members = users.members(g);
        let r: Vec<f64> = members.iter().map(|&u| terms[u].0).collect();
        let weights = soft_min_weights(&r, tau);
        for (&u, wgt) in members.iter().zip(weights) {
            let (_, noise_plus, sinr) = terms[u];
            let scale = wgt / (LN_2 * (1.0 + sinr));
            for (i, gi) in grad.iter_mut().enumerate() {
                if i == g {
                    *gi += scale * gain[(u, g)] / noise_plus;
                } else {
                    *gi -= scale * gain[(u, g)] * gain[(u, i)] * p[g] / (noise_plus * noise_plus);
                }
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn users(groups: Vec<Vec<[f64; 3]>>, noise: f64) -> UserSet {
        UserSet::grouped(groups, noise).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_group_has_no_interference() {
        let us = users(vec![vec![[0.0; 3]]], 0.5);
        let h = EffectiveChannels::new(DMatrix::from_row_slice(1, 2, &[c(1.0, 0.5), c(-0.3, 0.2)]));
        let w = Beamformer::dense(DMatrix::from_column_slice(
            2,
            1,
            &[c(0.7, 0.1), c(0.2, -0.4)],
        ));
        let report = sinr_all(&w, &h, &us).unwrap();
        let a = c(1.0, 0.5) * c(0.7, 0.1) + c(-0.3, 0.2) * c(0.2, -0.4);
        assert!((report.sinr[0] - a.norm_sqr() / 0.5).abs() < 1e-14);
        assert_eq!(report.interference[0], 0.0);
    }

    #[test]
    fn zero_beamformer_gives_zero_rates() {
        let us = users(vec![vec![[0.0; 3]], vec![[1.0, 0.0, 0.0]]], 1e-12);
        let h = EffectiveChannels::new(DMatrix::from_element(2, 2, c(1.0, 1.0)));
        let report = sinr_all(&Beamformer::zeros(2, 2), &h, &us).unwrap();
        assert!(report.sinr.iter().all(|&s| s == 0.0));
        assert_eq!(report.objective, 0.0);
    }

    #[test]
    fn zero_noise_and_interference_is_guarded() {
        let us = users(vec![vec![[0.0; 3]]], 0.0);
        let h = EffectiveChannels::new(DMatrix::from_element(1, 1, c(1.0, 0.0)));
        let w = Beamformer::diagonal(&[1.0]);
        assert!(matches!(
            sinr_all(&w, &h, &us),
            Err(Error::DivisionGuard(0))
        ));
    }

    #[test]
    fn lse_closed_form_examples() {
        assert!((soft_min(&[1.0, 1.0], 100.0) - (1.0 - 2f64.ln() / 100.0)).abs() < 1e-15);
        assert!((soft_min(&[1.0, 1.0], 100.0) - 0.99307).abs() < 1e-5);
        assert_eq!(soft_min(&[1.7], 100.0), 1.7);
        assert!((soft_min(&[0.5, 2.0], 1e6) - 0.5).abs() < 1e-5);
        let w = soft_min_weights(&[0.3, 0.3, 0.3], 100.0);
        assert!(w.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn single_group_gradient_by_hand() {
        let us = users(vec![vec![[0.0; 3], [1.0, 0.0, 0.0]]], 1e-3);
        let h = EffectiveChannels::new(DMatrix::from_column_slice(
            2,
            1,
            &[c(0.03, 0.01), c(-0.02, 0.02)],
        ));
        let p = [0.5];
        let tau = 100.0;
        let grad = lse_gradient(&p, &h, &us, tau).unwrap();
        let rates = division_rates(&p, &h, &us).unwrap();
        let w = soft_min_weights(&rates, tau);
        let expected: f64 = (0..2)
            .map(|u| {
                let g2 = h.get(u, 0).norm_sqr();
                w[u] * g2 / (LN_2 * (1e-3 + g2 * p[0]))
            })
            .sum();
        assert!((grad[0] - expected).abs() < 1e-12 * expected.abs());
    }
}
