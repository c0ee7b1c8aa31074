//! Concave quadratic minorizer of each user's rate around an anchor `(W0, X0)`:
//!
//! `R~ = c + 2 Re{a hhat^T w_g} - b sum_i |hhat^T w_i|^2`, all in bits/s/Hz.

use num_complex::Complex64;
use std::f64::consts::LN_2;

use crate::channel::{EffectiveChannels, UserSet};
use crate::error::Result;
use crate::rates::{amplitude, sinr_all, Beamformer};

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateCoeffs {
    pub a: Vec<Complex64>,
    pub b: Vec<f64>,
    pub constant: Vec<f64>,
}

/// Coefficients of the minorizer anchored at `w` on channels `h`.
pub fn surrogate_coeffs(
    w: &Beamformer,
    h: &EffectiveChannels,
    users: &UserSet,
) -> Result<SurrogateCoeffs> {
    let report = sinr_all(w, h, users)?;
    let k = users.len();
    let mut out = SurrogateCoeffs {
        a: Vec::with_capacity(k),
        b: Vec::with_capacity(k),
        constant: Vec::with_capacity(k),
    };
    for u in 0..k {
        let amp = report.desired[u];
        let sig = amp.norm_sqr();
        let noise = users.noise(u);
        let y = report.interference[u] + noise;
        if sig == 0.0 {
            out.a.push(Complex64::new(0.0, 0.0));
            out.b.push(0.0);
            out.constant.push(0.0);
            continue;
        }
        let b = sig / (LN_2 * y * (y + sig));
        out.a.push(amp.conj() / (LN_2 * y));
        out.b.push(b);
        out.constant
            .push(report.rate[u] - 2.0 * b * noise - b * (report.interference[u] + sig));
    }
    Ok(out)
}

/// Minorizer value for every user at beamformer `w`.
pub fn surrogate_rates(
    w: &Beamformer,
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
) -> Vec<f64> {
    (0..users.len())
        .map(|u| {
            let g = users.group_of(u);
            let received: f64 = (0..w.num_groups())
                .map(|i| amplitude(h, u, &w.w, i).norm_sqr())
                .sum();
            coeffs.constant[u] + 2.0 * (coeffs.a[u] * amplitude(h, u, &w.w, g)).re
                - coeffs.b[u] * received
        })
        .collect()
}

/// Sum over groups of the minimum minorizer value.
pub fn surrogate_objective(
    w: &Beamformer,
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
) -> f64 {
    let r = surrogate_rates(w, coeffs, h, users);
    crate::rates::group_minima(&r, users).iter().sum()
}
