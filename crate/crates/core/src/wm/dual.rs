//! Lagrange-dual solution of the surrogate max-min beamforming problem by
//! projected adaptive gradient descent (PAGD) on the group weights `delta`
//! and the power multiplier `nu`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{EffectiveChannels, UserSet};
use crate::config::{StepConstants, SystemConfig};
use crate::error::{Error, Result};
use crate::projection::project_simplex;
use crate::rates::Beamformer;

use super::surrogate::{surrogate_objective, surrogate_rates, SurrogateCoeffs};

const REGULARIZATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    /// Per-group simplex weights over that group's users, in member order.
    pub delta: Vec<Vec<f64>>,
    pub nu: f64,
    /// Inner iteration counter.
    pub q: usize,
    pub steps: StepConstants,
}

impl DualState {
    /// Uniform weights and `nu = 1`.
    pub fn uniform(users: &UserSet, steps: StepConstants) -> Self {
        Self {
            delta: (0..users.num_groups())
                .map(|g| {
                    let k = users.members(g).len();
                    vec![1.0 / k as f64; k]
                })
                .collect(),
            nu: 1.0,
            q: 0,
            steps,
        }
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.nu >= 0.0
            && self
                .delta
                .iter()
                .all(|d| d.iter().all(|&x| x >= 0.0) && (d.iter().sum::<f64>() - 1.0).abs() <= tol)
    }

    fn distance(&self, other: &Self) -> f64 {
        let dd: f64 = self
            .delta
            .iter()
            .flatten()
            .zip(other.delta.iter().flatten())
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        (dd + (self.nu - other.nu).powi(2)).sqrt()
    }
}

/// `Sum_{g,k} delta b hhat^* hhat^T + nu I` and the right-hand sides
/// `Sum_{k in K_g} delta a^* hhat^*` (one column per group).
fn normal_equations(
    dual: &DualState,
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let (feeds, groups) = (h.num_feeds(), users.num_groups());
    let mut lhs = DMatrix::<Complex64>::identity(feeds, feeds) * Complex64::new(dual.nu, 0.0);
    let mut rhs = DMatrix::<Complex64>::zeros(feeds, groups);
    for g in 0..groups {
        for (k, &u) in users.members(g).iter().enumerate() {
            let d = dual.delta[g][k];
            let row = h.hhat.row(u);
            let wb = d * coeffs.b[u];
            if wb != 0.0 {
                for r in 0..feeds {
                    let hr = row[r].conj() * wb;
                    for c in 0..feeds {
                        lhs[(r, c)] += hr * row[c];
                    }
                }
            }
            let wa = coeffs.a[u].conj() * d;
            for r in 0..feeds {
                rhs[(r, g)] += wa * row[r].conj();
            }
        }
    }
    (lhs, rhs)
}

/// Maximiser of the Lagrangian over `W` for fixed duals. The flag reports
/// whether the system had to be regularised.
pub fn optimal_beamformer(
    dual: &DualState,
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
) -> Result<(Beamformer, bool)> {
    let (mut lhs, rhs) = normal_equations(dual, coeffs, h, users);
    let mut regularized = false;
    let chol = match lhs.clone().cholesky() {
        Some(c) => c,
        None => {
            regularized = true;
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += REGULARIZATION;
            }
            lhs.clone().cholesky().ok_or_else(|| {
                Error::NonFinite("dual normal equations are not positive definite".into())
            })?
        }
    };
    let mut w = chol.solve(&rhs);
    // One step of iterative refinement.
    let residual = &rhs - &lhs * &w;
    w += chol.solve(&residual);
    if w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("optimal beamformer".into()));
    }
    Ok((Beamformer::dense(w), regularized))
}

/// Per-group norm of the Lagrangian gradient `rhs_g - M w_g`.
pub fn stationarity_residual(
    dual: &DualState,
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
    w: &Beamformer,
) -> Vec<f64> {
    let (lhs, rhs) = normal_equations(dual, coeffs, h, users);
    let r = rhs - lhs * &w.w;
    r.column_iter().map(|c| c.norm()).collect()
}

/// Subgradient step on `delta` followed by exact simplex projection per group.
pub fn delta_step(dual: &DualState, surrogate: &[f64], users: &UserSet) -> DualState {
    let s = dual.steps;
    let damp = s.rho_c + dual.q as f64 * s.rho_mu;
    let delta = (0..users.num_groups())
        .map(|g| {
            let members = users.members(g);
            let floor = members
                .iter()
                .map(|&u| surrogate[u])
                .fold(f64::INFINITY, f64::min);
            let stepped: Vec<f64> = members
                .iter()
                .zip(&dual.delta[g])
                .map(|(&u, &d)| {
                    let sub = surrogate[u] - floor;
                    d - d / (sub + damp) * sub
                })
                .collect();
            project_simplex(&stepped, 1.0)
        })
        .collect();
    DualState {
        delta,
        ..dual.clone()
    }
}

/// Projected dual-descent step on the power multiplier.
pub fn nu_step(dual: &DualState, power: f64, budget: f64) -> DualState {
    let s = dual.steps;
    let xi = s.rho_p / (s.rho_t + dual.q as f64 * s.rho_eta);
    DualState {
        nu: (dual.nu + xi * (power - budget)).max(0.0),
        ..dual.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PagdOutcome {
    pub beamformer: Beamformer,
    pub dual: DualState,
    /// Surrogate max-min objective of `beamformer`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub regularized: bool,
    /// The supplied incumbent was at least as good as every PAGD iterate.
    pub kept_incumbent: bool,
}

/// Runs PAGD for one set of surrogate coefficients.
///
/// Internally the channels are scaled by `sqrt(budget)` so the budget is 1;
/// the coefficients are invariant under that change of units. Every primal
/// iterate is scaled down onto the budget if needed and the best one by
/// surrogate objective is returned. An `incumbent` beamformer, if given,
/// competes with the iterates, which makes MM rounds monotone.
pub fn pagd_solve(
    coeffs: &SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
    budget: f64,
    cfg: &SystemConfig,
    incumbent: Option<&Beamformer>,
) -> Result<PagdOutcome> {
    let scale = budget.sqrt();
    let hs = h.scaled(scale);
    let mut dual = DualState::uniform(users, cfg.steps);
    let mut best: Option<(Beamformer, f64, DualState)> = None;
    let mut regularized = false;
    let mut converged = false;
    let mut iterations = 0;
    for q in 0..cfg.max_pagd_iterations {
        iterations = q + 1;
        dual.q = q;
        let (w, reg) = optimal_beamformer(&dual, coeffs, &hs, users)?;
        regularized |= reg;
        let power = w.power();
        // Candidates: the iterate pulled inside the budget, and the iterate
        // stretched onto it (the dual price may not yet have settled).
        let feasible = if power > 1.0 {
            w.scaled(1.0 / power.sqrt())
        } else {
            w.clone()
        };
        let stretched = (power > 0.0 && power < 1.0).then(|| w.scaled(1.0 / power.sqrt()));
        for cand in std::iter::once(feasible).chain(stretched) {
            let value = surrogate_objective(&cand, coeffs, &hs, users);
            if best.as_ref().is_none_or(|(_, v, _)| value > *v) {
                best = Some((cand, value, dual.clone()));
            }
        }
        let rates = surrogate_rates(&w, coeffs, &hs, users);
        let next = nu_step(&delta_step(&dual, &rates, users), power, 1.0);
        let change = dual.distance(&next);
        dual = next;
        if change <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let (mut w, mut value, best_dual) = best.expect("at least one PAGD iteration");
    let mut kept_incumbent = false;
    if let Some(inc) = incumbent {
        let mut inc = inc.scaled(1.0 / scale);
        let p = inc.power();
        if p > 1.0 {
            inc = inc.scaled(1.0 / p.sqrt());
        }
        let v = surrogate_objective(&inc, coeffs, &hs, users);
        if v >= value {
            w = inc;
            value = v;
            kept_incumbent = true;
        }
    }
    Ok(PagdOutcome {
        beamformer: w.scaled(scale),
        dual: if converged { dual } else { best_dual },
        value,
        iterations,
        converged,
        regularized,
        kept_incumbent,
    })
}
