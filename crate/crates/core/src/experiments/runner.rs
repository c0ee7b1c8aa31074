use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{baseline_multicast_solve, fixed_array_channels, ArrayKind, FixedArray};
use crate::channel::UserSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::radiation::RadiationModel;
use crate::wd::{WdSolver, WdState};
use crate::wm::WmSolver;

use super::sampling::{sample_users_with, trial_rng, trial_seed};
use super::scenario::{Architecture, Scenario, SweepVariable};

/// One solve (or one point of a convergence trace) of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub sweep_value: f64,
    pub architecture: Architecture,
    /// `None` for the fixed arrays.
    pub radiation_model: Option<RadiationModel>,
    pub trial: usize,
    /// bits/s/Hz; NaN marks a failed solve.
    pub objective: f64,
    pub group_min_rates: Vec<f64>,
    pub iterations: usize,
    pub wall_ms: u64,
}

impl ResultRow {
    pub fn is_failed(&self) -> bool {
        self.objective.is_nan()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
    /// Record wall-clock time per solve (makes output non-reproducible).
    pub timing: bool,
}

/// Rounds to the nine significant digits written to CSV, so rows survive a
/// write/read cycle unchanged.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Solver output before it is turned into rows.
struct Solve {
    objective: f64,
    group_min: Vec<f64>,
    iterations: usize,
    trace: Vec<f64>,
}

fn init_rng(root: u64, trial: usize, arch: Architecture) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(
        root ^ (0xA076_1D64_78BD_642F_u64.wrapping_mul(arch as u64 + 1)),
        trial,
    ))
}

fn solve(
    arch: Architecture,
    cfg: &SystemConfig,
    users: &UserSet,
    scenario: &Scenario,
    trial: usize,
) -> Result<Solve> {
    let mut rng = init_rng(scenario.seed, trial, arch);
    match arch {
        Architecture::Wd => {
            let solver = WdSolver::new(cfg, users)?;
            let seed = if scenario.random_init {
                WdState::random(cfg, &mut rng)?
            } else {
                WdState::initial(cfg)?
            };
            let out = solver.run(seed)?;
            Ok(Solve {
                objective: out.report.objective,
                group_min: out.report.group_min,
                iterations: out.state.iteration,
                trace: out.state.trace,
            })
        }
        Architecture::Wm => {
            let solver = WmSolver::new(cfg, users)?;
            let seed = if scenario.random_init {
                solver.random_state(&mut rng)?
            } else {
                solver.initial_state()?
            };
            let out = solver.run(seed)?;
            Ok(Solve {
                objective: out.report.objective,
                group_min: out.report.group_min,
                iterations: out.state.iteration,
                trace: out.state.trace,
            })
        }
        Architecture::Conventional | Architecture::Massive => {
            let kind = if arch == Architecture::Conventional {
                ArrayKind::Conventional
            } else {
                ArrayKind::Massive
            };
            let h = fixed_array_channels(&FixedArray::new(kind, cfg), users, cfg)?;
            let out = baseline_multicast_solve(&h, users, cfg)?;
            Ok(Solve {
                objective: out.report.objective,
                group_min: out.report.group_min,
                iterations: out.rounds,
                trace: out.trace,
            })
        }
    }
}

/// Every (architecture, radiation model) combination a scenario runs.
fn variants(scenario: &Scenario) -> Vec<(Architecture, Option<RadiationModel>)> {
    let mut out = Vec::new();
    for &arch in &scenario.architectures {
        if arch.is_pinching() {
            out.extend(scenario.radiation_models.iter().map(|&r| (arch, Some(r))));
        } else {
            out.push((arch, None));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn run_task(scenario: &Scenario, sweep_index: usize, trial: usize, timing: bool) -> Vec<ResultRow> {
    let iterations_sweep = scenario.sweep == SweepVariable::Iterations;
    let value = scenario.values[sweep_index];
    let base = if iterations_sweep {
        scenario.base.clone()
    } else {
        scenario.config_for(value).expect("validated")
    };
    let users = sample_users_with(
        &base,
        scenario.distribution,
        &mut trial_rng(scenario.seed, trial),
    );
    let mut rows = Vec::new();
    for (arch, radiation) in variants(scenario) {
        let mut cfg = base.clone();
        if let Some(r) = radiation {
            cfg.radiation_model = r;
        }
        let start = Instant::now();
        let result = users
            .as_ref()
            .map_err(|e| Error::Input(e.to_string()))
            .and_then(|u| solve(arch, &cfg, u, scenario, trial));
        let wall_ms = if timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        let row =
            |sweep_value: f64, objective: f64, group_min: Vec<f64>, iterations: usize| ResultRow {
                scenario: scenario.name.clone(),
                sweep_value,
                architecture: arch,
                radiation_model: radiation,
                trial,
                objective: round_sig(objective),
                group_min_rates: group_min.into_iter().map(round_sig).collect(),
                iterations,
                wall_ms,
            };
        match result {
            Ok(s) if iterations_sweep => {
                for &v in &scenario.values {
                    let t = (v as usize).min(s.trace.len() - 1);
                    let minima = if t + 1 == s.trace.len() {
                        s.group_min.clone()
                    } else {
                        Vec::new()
                    };
                    rows.push(row(v, s.trace[t], minima, t));
                }
            }
            Ok(s) => rows.push(row(value, s.objective, s.group_min, s.iterations)),
            Err(_) if iterations_sweep => {
                rows.extend(
                    scenario
                        .values
                        .iter()
                        .map(|&v| row(v, f64::NAN, Vec::new(), 0)),
                );
            }
            Err(_) => rows.push(row(value, f64::NAN, Vec::new(), 0)),
        }
    }
    rows
}

/// Sort key: sweep value, architecture, radiation model, trial.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.architecture.cmp(&b.architecture))
            .then(a.radiation_model.cmp(&b.radiation_model))
            .then(a.trial.cmp(&b.trial))
    });
}

/// Runs every sweep point, trial and architecture of a scenario. Trials run
/// in parallel; the output order and contents do not depend on the thread
/// count. Failed solves produce rows with a NaN objective.
pub fn run_scenario(scenario: &Scenario, options: RunOptions) -> Result<Vec<ResultRow>> {
    scenario.validate()?;
    let points = if scenario.sweep == SweepVariable::Iterations {
        1
    } else {
        scenario.values.len()
    };
    let tasks: Vec<(usize, usize)> = (0..points)
        .flat_map(|s| (0..scenario.trials).map(move |t| (s, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<ResultRow> = pool.install(|| {
        tasks
            .par_iter()
            .flat_map_iter(|&(s, t)| run_task(scenario, s, t, options.timing))
            .collect()
    });
    sort_rows(&mut rows);
    Ok(rows)
}

/// Mean objective of the successful rows matching a filter.
pub fn mean_objective(rows: &[ResultRow], keep: impl Fn(&ResultRow) -> bool) -> Option<f64> {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| !r.is_failed() && keep(r))
        .map(|r| r.objective)
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}
