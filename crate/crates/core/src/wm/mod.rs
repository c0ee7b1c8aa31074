//! Waveguide-multiplexing design: every waveguide carries a combination of all
//! group streams through a dense beamformer `W` (waveguides x groups).
//!
//! Each alternating round builds the rate minorizer at the current point,
//! sweeps every antenna over its candidate grid positions, rebuilds the
//! minorizer on the new layout and re-solves the beamformer by PAGD with the
//! current `W` as incumbent. Both steps can only raise the minorizer, which is
//! tight at its anchor, so the true objective never decreases.

pub mod dual;
mod placement;
pub mod surrogate;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelAtlas, EffectiveChannels, UserSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::layout::{candidate_set, PinchLayout};
use crate::radiation::AmplitudeKernel;
use crate::rates::{sinr_all, Beamformer, RateReport};
use crate::wd::ElementUpdate;

pub use dual::{
    delta_step, nu_step, optimal_beamformer, pagd_solve, stationarity_residual, DualState,
    PagdOutcome,
};
pub use surrogate::{surrogate_coeffs, surrogate_objective, surrogate_rates, SurrogateCoeffs};

#[derive(Debug, Clone, PartialEq)]
pub struct WmState {
    pub beamformer: Beamformer,
    pub layout: PinchLayout,
    pub iteration: usize,
    /// True objective after each round; entry 0 is the starting point.
    pub trace: Vec<f64>,
}

impl WmState {
    pub fn new(beamformer: Beamformer, layout: PinchLayout) -> Self {
        Self {
            beamformer,
            layout,
            iteration: 0,
            trace: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WmOutcome {
    pub state: WmState,
    pub report: RateReport,
    pub converged: bool,
    pub evaluations: usize,
    pub pagd_iterations: usize,
}

/// Result of minorize-maximize beamforming over fixed channels.
#[derive(Debug, Clone, PartialEq)]
pub struct MmOutcome {
    pub beamformer: Beamformer,
    pub report: RateReport,
    pub trace: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
}

/// Complex Gaussian beamformer scaled to the full budget.
pub fn random_beamformer<R: Rng + ?Sized>(
    feeds: usize,
    groups: usize,
    budget: f64,
    rng: &mut R,
) -> Beamformer {
    let w = DMatrix::from_fn(feeds, groups, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let b = Beamformer::dense(w);
    let p = b.power();
    b.scaled((budget / p).sqrt())
}

fn fit_budget(w: Beamformer, budget: f64) -> Beamformer {
    let p = w.power();
    if p > budget {
        w.scaled((budget / p).sqrt())
    } else {
        w
    }
}

/// Max-min multicast beamforming on fixed channels: MM rounds of PAGD, each
/// seeded with the previous beamformer as incumbent, until the normalised
/// beamformer change is below `cfg.tolerance`.
pub fn mm_beamforming(
    h: &EffectiveChannels,
    users: &UserSet,
    budget: f64,
    cfg: &SystemConfig,
    start: Beamformer,
) -> Result<MmOutcome> {
    let mut w = fit_budget(start, budget);
    let mut current = sinr_all(&w, h, users)?.objective;
    let mut trace = vec![current];
    let mut converged = false;
    let mut rounds = 0;
    for _ in 0..cfg.max_ao_rounds {
        rounds += 1;
        let coeffs = surrogate_coeffs(&w, h, users)?;
        let out = pagd_solve(&coeffs, h, users, budget, cfg, Some(&w))?;
        let value = sinr_all(&out.beamformer, h, users)?.objective;
        let step = out.beamformer.distance(&w) / budget.sqrt();
        if value >= current {
            w = out.beamformer;
            current = value;
        }
        trace.push(current);
        if step <= cfg.tolerance || out.kept_incumbent {
            converged = true;
            break;
        }
    }
    Ok(MmOutcome {
        report: sinr_all(&w, h, users)?,
        beamformer: w,
        trace,
        rounds,
        converged,
    })
}

/// Waveguide-multiplexing solver bound to one user drop.
pub struct WmSolver<'a> {
    cfg: &'a SystemConfig,
    users: &'a UserSet,
    atlas: ChannelAtlas,
    kernel: AmplitudeKernel,
}

impl<'a> WmSolver<'a> {
    pub fn new(cfg: &'a SystemConfig, users: &'a UserSet) -> Result<Self> {
        cfg.validate()?;
        if cfg.num_waveguides < cfg.num_groups {
            return Err(Error::Config(format!(
                "multiplexing needs at least as many waveguides ({}) as groups ({})",
                cfg.num_waveguides, cfg.num_groups
            )));
        }
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

    pub fn channels(&self, layout: &PinchLayout) -> EffectiveChannels {
        let amps: Vec<Vec<f64>> = (0..layout.num_waveguides())
            .map(|m| {
                let mut a = vec![0.0; layout.pas_per_waveguide()];
                self.kernel.amplitudes(layout.indices(m), &mut a);
                a
            })
            .collect();
        self.atlas.effective(layout, &amps)
    }

    /// Uniform layout with group-matched equal-power columns.
    pub fn initial_state(&self) -> Result<WmState> {
        let layout = PinchLayout::uniform(self.cfg)?;
        let w =
            Beamformer::group_matched(&self.channels(&layout), self.users, self.cfg.total_power);
        Ok(WmState::new(w, layout))
    }

    /// Random layout and random full-budget beamformer.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WmState> {
        let layout = PinchLayout::random(self.cfg, rng)?;
        let w = random_beamformer(
            self.cfg.num_waveguides,
            self.cfg.num_groups,
            self.cfg.total_power,
            rng,
        );
        Ok(WmState::new(w, layout))
    }

    pub fn candidates(&self, layout: &PinchLayout, m: usize, n: usize) -> Vec<usize> {
        candidate_set(layout, m, n, self.cfg.min_spacing())
    }

    /// Surrogate objective with antenna `(m, n)` moved to `index`.
    pub fn placement_value(
        &self,
        layout: &PinchLayout,
        m: usize,
        n: usize,
        index: usize,
        w: &Beamformer,
        coeffs: &SurrogateCoeffs,
    ) -> Option<f64> {
        let ctx =
            placement::context_for(&self.atlas, &self.kernel, layout, w, m, coeffs, self.users);
        let mut row = layout.indices(m).to_vec();
        row[n] = index;
        ctx.value(
            &self.atlas,
            &self.kernel,
            self.cfg.reject_infeasible_radiation,
            &row,
        )
    }

    /// Best candidate position for antenna `(m, n)` under the surrogate
    /// objective; ties go to the lowest index and the current position is kept
    /// unless beaten.
    pub fn element_update(
        &self,
        layout: &PinchLayout,
        m: usize,
        n: usize,
        w: &Beamformer,
        coeffs: &SurrogateCoeffs,
    ) -> ElementUpdate {
        let ctx =
            placement::context_for(&self.atlas, &self.kernel, layout, w, m, coeffs, self.users);
        let reject = self.cfg.reject_infeasible_radiation;
        let mut row = layout.indices(m).to_vec();
        let current = row[n];
        let current_value = ctx
            .value(&self.atlas, &self.kernel, reject, &row)
            .unwrap_or(f64::NEG_INFINITY);
        let candidates = self.candidates(layout, m, n);
        let mut best: Option<(usize, f64)> = None;
        for &c in &candidates {
            row[n] = c;
            if let Some(v) = ctx.value(&self.atlas, &self.kernel, reject, &row) {
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

    /// Alternating optimisation until both the layout and the normalised
    /// beamformer stop moving, or the round cap.
    pub fn run(&self, seed: WmState) -> Result<WmOutcome> {
        let cfg = self.cfg;
        let budget = cfg.total_power;
        let mut state = seed;
        state.layout.validate(cfg.min_spacing())?;
        if state.beamformer.num_feeds() != cfg.num_waveguides
            || state.beamformer.num_groups() != cfg.num_groups
        {
            return Err(Error::Dimension(
                "beamformer shape differs from waveguides x groups".into(),
            ));
        }
        state.beamformer = fit_budget(state.beamformer, budget);
        let mut h = self.channels(&state.layout);
        let mut current = sinr_all(&state.beamformer, &h, self.users)?.objective;
        state.trace = vec![current];
        let mut evaluations = 0;
        let mut pagd_iterations = 0;
        let mut converged = false;

        for _ in 0..cfg.max_ao_rounds {
            let prev_w = state.beamformer.clone();
            let prev_layout = state.layout.clone();

            let coeffs = surrogate_coeffs(&state.beamformer, &h, self.users)?;
            for m in 0..state.layout.num_waveguides() {
                for n in 0..state.layout.pas_per_waveguide() {
                    let upd = self.element_update(&state.layout, m, n, &state.beamformer, &coeffs);
                    evaluations += upd.evaluations;
                    if upd.index != state.layout.indices(m)[n] {
                        state.layout.set_index(m, n, upd.index);
                    }
                }
            }
            if state.layout != prev_layout {
                let trial_h = self.channels(&state.layout);
                let value = sinr_all(&state.beamformer, &trial_h, self.users)?.objective;
                if value >= current {
                    h = trial_h;
                    current = value;
                } else {
                    state.layout = prev_layout.clone();
                }
            }

            let coeffs = surrogate_coeffs(&state.beamformer, &h, self.users)?;
            let out = pagd_solve(
                &coeffs,
                &h,
                self.users,
                budget,
                cfg,
                Some(&state.beamformer),
            )?;
            pagd_iterations += out.iterations;
            let value = sinr_all(&out.beamformer, &h, self.users)?.objective;
            if value >= current {
                state.beamformer = out.beamformer;
                current = value;
            }

            state.iteration += 1;
            state.trace.push(current);
            let dw = state.beamformer.distance(&prev_w) / budget.sqrt();
            let dx = state.layout.distance(&prev_layout);
            if dw <= cfg.tolerance && dx <= cfg.tolerance {
                converged = true;
                break;
            }
        }

        let report = sinr_all(&state.beamformer, &h, self.users)?;
        Ok(WmOutcome {
            state,
            report,
            converged,
            evaluations,
            pagd_iterations,
        })
    }

    /// Beamforming only, with the layout frozen.
    pub fn beamform(&self, layout: &PinchLayout, start: Beamformer) -> Result<MmOutcome> {
        mm_beamforming(
            &self.channels(layout),
            self.users,
            self.cfg.total_power,
            self.cfg,
            start,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_fewer_waveguides_than_groups() {
        let cfg = SystemConfig {
            num_waveguides: 1,
            grid_size: 50,
            ..SystemConfig::default()
        }
        .with_groups(2, 1);
        let users = UserSet::grouped(
            vec![vec![[1.0, 1.0, 0.0]], vec![[8.0, 4.0, 0.0]]],
            cfg.noise_power,
        )
        .unwrap();
        assert!(WmSolver::new(&cfg, &users).is_err());
    }

    #[test]
    fn fixed_point_returns_after_one_round() {
        let cfg = SystemConfig {
            num_waveguides: 2,
            pas_per_waveguide: 2,
            grid_size: 40,
            ..SystemConfig::default()
        }
        .with_groups(2, 1);
        let users = UserSet::grouped(
            vec![vec![[2.0, 1.0, 0.0]], vec![[8.0, 5.0, 0.0]]],
            cfg.noise_power,
        )
        .unwrap();
        let solver = WmSolver::new(&cfg, &users).unwrap();
        let first = solver.run(solver.initial_state().unwrap()).unwrap();
        assert!(first.converged);
        let mut seed = first.state.clone();
        seed.iteration = 0;
        let again = solver.run(seed).unwrap();
        assert_eq!(again.state.iteration, 1);
        assert_eq!(again.state.layout, first.state.layout);
        let moved =
            again.state.beamformer.distance(&first.state.beamformer) / cfg.total_power.sqrt();
        assert!(moved <= cfg.tolerance, "{moved}");
    }
}
