//! Waveguide-division design: waveguide `g` carries only group `g`'s stream, so
//! the transmit beamformer reduces to a power allocation `p`.
//!
//! One alternating round runs the smoothed projected-gradient power update and
//! then a waveguide-major sweep of one-dimensional grid searches over the
//! antenna positions. Each step is accepted only if the true multicast
//! objective does not drop, so the per-round trace is monotone.

use rand::Rng;

use crate::channel::{ChannelAtlas, EffectiveChannels, UserSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::layout::{candidate_set, PinchLayout};
use crate::projection::project_power;
use crate::radiation::AmplitudeKernel;
use crate::rates::{lse_gradient, lse_value, sinr_all, Beamformer, RateReport};

#[derive(Debug, Clone, PartialEq)]
pub struct WdState {
    /// Power allocated to each group's waveguide, watts.
    pub power: Vec<f64>,
    pub layout: PinchLayout,
    /// Completed alternating rounds.
    pub iteration: usize,
    /// Last accepted projected-gradient step.
    pub step: f64,
    /// True objective after each round; entry 0 is the starting point.
    pub trace: Vec<f64>,
}

impl WdState {
    /// Evenly spread antennas and an equal power split.
    pub fn initial(cfg: &SystemConfig) -> Result<Self> {
        Ok(Self::new(
            vec![cfg.total_power / cfg.num_groups as f64; cfg.num_groups],
            PinchLayout::uniform(cfg)?,
        ))
    }

    /// Random layout and a random point of the power simplex.
    pub fn random<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<Self> {
        let layout = PinchLayout::random(cfg, rng)?;
        let raw: Vec<f64> = (0..cfg.num_groups)
            .map(|_| -rng.random::<f64>().max(1e-12).ln())
            .collect();
        let s: f64 = raw.iter().sum();
        Ok(Self::new(
            raw.iter().map(|v| v / s * cfg.total_power).collect(),
            layout,
        ))
    }

    pub fn new(power: Vec<f64>, layout: PinchLayout) -> Self {
        Self {
            power,
            layout,
            iteration: 0,
            step: 1.0,
            trace: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome {
    pub power: Vec<f64>,
    /// Smoothed objective at `power`.
    pub value: f64,
    pub iterations: usize,
    pub step: f64,
    pub converged: bool,
}

/// Projected gradient ascent on the log-sum-exp smoothed objective over
/// `{p >= 0, sum p <= budget}`.
///
/// Works on the normalised allocation `p / budget` with diminishing base step
/// `1/sqrt(t+1)`; a step that would lower the smoothed objective is halved
/// until it does not, so the returned point is never worse than the start.
/// Convergence is declared when the normalised update is below `tol`.
pub fn optimize_power(
    start: &[f64],
    h: &EffectiveChannels,
    users: &UserSet,
    budget: f64,
    tau: f64,
    max_iter: usize,
    tol: f64,
) -> Result<PowerOutcome> {
    let hs = h.scaled(budget.sqrt());
    let start_norm: Vec<f64> = start.iter().map(|p| p / budget).collect();
    let mut u = project_power(&start_norm, 1.0);
    let mut value = lse_value(&u, &hs, users, tau)?;
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    for t in 0..max_iter {
        iterations = t + 1;
        let grad = lse_gradient(&u, &hs, users, tau)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!(
                "power gradient at iteration {t}: {grad:?}"
            )));
        }
        let mut alpha = 1.0 / ((t + 1) as f64).sqrt();
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = u.iter().zip(&grad).map(|(x, g)| x + alpha * g).collect();
            let cand = project_power(&trial, 1.0);
            let v = lse_value(&cand, &hs, users, tau)?;
            if v >= value {
                accepted = Some((cand, v));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            converged = true;
            break;
        };
        let delta = cand
            .iter()
            .zip(&u)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        u = cand;
        value = v;
        step = alpha;
        if delta <= tol {
            converged = true;
            break;
        }
    }
    Ok(PowerOutcome {
        power: u.iter().map(|x| x * budget).collect(),
        value,
        iterations,
        step,
        converged,
    })
}

/// Result of one element-wise placement search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementUpdate {
    pub index: usize,
    /// Sum of per-group minimum SINRs at the chosen position.
    pub value: f64,
    /// Candidate positions evaluated.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WdOutcome {
    pub state: WdState,
    pub report: RateReport,
    pub converged: bool,
    /// Candidate positions evaluated across all element updates.
    pub evaluations: usize,
}

/// Waveguide-division solver bound to one user drop.
pub struct WdSolver<'a> {
    cfg: &'a SystemConfig,
    users: &'a UserSet,
    atlas: ChannelAtlas,
    kernel: AmplitudeKernel,
}

impl<'a> WdSolver<'a> {
    pub fn new(cfg: &'a SystemConfig, users: &'a UserSet) -> Result<Self> {
        cfg.validate()?;
        cfg.require_division()?;
        if users.num_groups() != cfg.num_groups {
            return Err(Error::Dimension(format!(
                "{} user groups for {} configured groups",
                users.num_groups(),
                cfg.num_groups
            )));
        }
        Ok(Self {
            cfg,
            users,
            atlas: ChannelAtlas::build(cfg, users)?,
            kernel: AmplitudeKernel::new(cfg),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        self.cfg
    }

    fn amplitudes(&self, layout: &PinchLayout) -> Vec<Vec<f64>> {
        (0..layout.num_waveguides())
            .map(|m| {
                let mut a = vec![0.0; layout.pas_per_waveguide()];
                self.kernel.amplitudes(layout.indices(m), &mut a);
                a
            })
            .collect()
    }

    /// Effective channels of a layout.
    pub fn channels(&self, layout: &PinchLayout) -> EffectiveChannels {
        self.atlas.effective(layout, &self.amplitudes(layout))
    }

    /// True multicast objective for allocation `power` on `layout`.
    pub fn objective(&self, layout: &PinchLayout, power: &[f64]) -> Result<f64> {
        Ok(sinr_all(
            &Beamformer::diagonal(power),
            &self.channels(layout),
            self.users,
        )?
        .objective)
    }

    pub fn candidates(&self, layout: &PinchLayout, m: usize, n: usize) -> Vec<usize> {
        candidate_set(layout, m, n, self.cfg.min_spacing())
    }

    /// Sum of per-group minimum SINRs with antenna `(m, n)` moved to grid index
    /// `index`; `None` if the resulting radiation row is inadmissible.
    pub fn placement_value(
        &self,
        layout: &PinchLayout,
        m: usize,
        n: usize,
        index: usize,
        power: &[f64],
    ) -> Option<f64> {
        let ctx = PlacementContext::new(self, layout, m, power);
        let mut row = layout.indices(m).to_vec();
        row[n] = index;
        ctx.value(self, &row)
    }

    /// Best grid position for antenna `(m, n)` with everything else fixed.
    ///
    /// Ties go to the lowest candidate index; the current position is kept when
    /// the candidate set is empty or no candidate beats it.
    pub fn element_update(
        &self,
        layout: &PinchLayout,
        m: usize,
        n: usize,
        power: &[f64],
    ) -> ElementUpdate {
        let ctx = PlacementContext::new(self, layout, m, power);
        let mut row = layout.indices(m).to_vec();
        let current = row[n];
        let current_value = ctx.value(self, &row).unwrap_or(f64::NEG_INFINITY);
        let candidates = self.candidates(layout, m, n);
        let mut best: Option<(usize, f64)> = None;
        for &c in &candidates {
            row[n] = c;
            if let Some(v) = ctx.value(self, &row) {
                if best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((c, v));
                }
            }
        }
        let (index, value) = match best {
            Some((c, v)) if v >= current_value => (c, v),
            _ => (current, current_value),
        };
        ElementUpdate {
            index,
            value,
            evaluations: candidates.len(),
        }
    }

    /// Alternating optimisation from `seed` until both the allocation and the
    /// layout stop moving (tolerance `cfg.tolerance`, allocation normalised by
    /// the budget) or the round cap is hit.
    pub fn run(&self, seed: WdState) -> Result<WdOutcome> {
        let cfg = self.cfg;
        let mut state = seed;
        state.layout.validate(cfg.min_spacing())?;
        if state.power.len() != cfg.num_groups {
            return Err(Error::Dimension(
                "power vector length differs from group count".into(),
            ));
        }
        state.power = project_power(&state.power, cfg.total_power);
        let mut h = self.channels(&state.layout);
        let mut current = sinr_all(&Beamformer::diagonal(&state.power), &h, self.users)?.objective;
        state.trace = vec![current];
        let mut evaluations = 0;
        let mut converged = false;

        for _ in 0..cfg.max_ao_rounds {
            let prev_power = state.power.clone();
            let prev_layout = state.layout.clone();

            let out = optimize_power(
                &state.power,
                &h,
                self.users,
                cfg.total_power,
                cfg.smoothing,
                cfg.max_pgd_iterations,
                cfg.tolerance,
            )?;
            let value = sinr_all(&Beamformer::diagonal(&out.power), &h, self.users)?.objective;
            if value >= current {
                state.power = out.power;
                state.step = out.step;
                current = value;
            }

            for m in 0..state.layout.num_waveguides() {
                for n in 0..state.layout.pas_per_waveguide() {
                    let upd = self.element_update(&state.layout, m, n, &state.power);
                    evaluations += upd.evaluations;
                    let old = state.layout.indices(m)[n];
                    if upd.index == old {
                        continue;
                    }
                    state.layout.set_index(m, n, upd.index);
                    let trial_h = self.channels(&state.layout);
                    let value =
                        sinr_all(&Beamformer::diagonal(&state.power), &trial_h, self.users)?
                            .objective;
                    if value >= current {
                        current = value;
                        h = trial_h;
                    } else {
                        state.layout.set_index(m, n, old);
                    }
                }
            }

            state.iteration += 1;
            state.trace.push(current);
            let dp = state
                .power
                .iter()
                .zip(&prev_power)
                .map(|(a, b)| ((a - b) / cfg.total_power).powi(2))
                .sum::<f64>()
                .sqrt();
            let dx = state.layout.distance(&prev_layout);
            if dp <= cfg.tolerance && dx <= cfg.tolerance {
                converged = true;
                break;
            }
        }

        let report = sinr_all(&Beamformer::diagonal(&state.power), &h, self.users)?;
        Ok(WdOutcome {
            state,
            report,
            converged,
            evaluations,
        })
    }
}

/// Constants of the single-waveguide placement subproblem.
///
/// With `G_{u,i} = |hhat_{u,i}|^2 P_i`, a user of group `m` sees
/// `A_u / C0_u` and a user of group `i != m` sees `C1_u / (A_u + C2_u)`, where
/// only `A_u = |hhat_{u,m}|^2 P_m` depends on waveguide `m`'s antennas.
struct PlacementContext<'p> {
    m: usize,
    power_m: f64,
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
    users: &'p UserSet,
}

impl<'p> PlacementContext<'p> {
    fn new(solver: &WdSolver<'p>, layout: &PinchLayout, m: usize, power: &[f64]) -> Self {
        let users = solver.users;
        let h = solver.channels(layout);
        let k = users.len();
        let (mut c0, mut c1, mut c2) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
        for u in 0..k {
            let g = users.group_of(u);
            let recv: Vec<f64> = (0..power.len())
                .map(|i| h.get(u, i).norm_sqr() * power[i])
                .collect();
            let noise = users.noise(u);
            if g == m {
                c0[u] = recv
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != m)
                    .map(|(_, r)| r)
                    .sum::<f64>()
                    + noise;
            } else {
                c1[u] = recv[g];
                c2[u] = recv
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != g && i != m)
                    .map(|(_, r)| r)
                    .sum::<f64>()
                    + noise;
            }
        }
        Self {
            m,
            power_m: power[m],
            c0,
            c1,
            c2,
            users,
        }
    }

    fn value(&self, solver: &WdSolver<'_>, row: &[usize]) -> Option<f64> {
        let mut amps = [0.0; 64];
        let mut heap;
        let amps: &mut [f64] = if row.len() <= amps.len() {
            &mut amps[..row.len()]
        } else {
            heap = vec![0.0; row.len()];
            &mut heap
        };
        let status = solver.kernel.amplitudes(row, amps);
        if !AmplitudeKernel::admissible(status, solver.cfg.reject_infeasible_radiation) {
            return None;
        }
        let mut total = 0.0;
        for g in 0..self.users.num_groups() {
            let mut worst = f64::INFINITY;
            for &u in self.users.members(g) {
                let a = solver.atlas.waveguide_gain(u, self.m, row, amps).norm_sqr() * self.power_m;
                let sinr = if g == self.m {
                    a / self.c0[u]
                } else {
                    self.c1[u] / (a + self.c2[u])
                };
                worst = worst.min(sinr);
            }
            total += worst;
        }
        Some(total)
    }
}
