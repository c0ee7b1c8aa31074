#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinch_multicast::channel::{EffectiveChannels, UserSet};
use pinch_multicast::SystemConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
}

pub fn random_channels<R: Rng>(
    rng: &mut R,
    users: usize,
    feeds: usize,
    scale: f64,
) -> EffectiveChannels {
    EffectiveChannels::new(DMatrix::from_fn(users, feeds, |_, _| cplx(rng, scale)))
}

/// `groups` groups of `k` users dropped uniformly in the configured region.
pub fn random_users<R: Rng>(rng: &mut R, cfg: &SystemConfig, groups: usize, k: usize) -> UserSet {
    let pos = (0..groups)
        .map(|_| {
            (0..k)
                .map(|_| {
                    [
                        rng.random_range(0.0..cfg.region_x),
                        rng.random_range(0.0..cfg.region_y),
                        0.0,
                    ]
                })
                .collect()
        })
        .collect();
    UserSet::grouped(pos, cfg.noise_power).unwrap()
}

/// Abstract users with only a group structure (positions unused).
pub fn abstract_users(groups: usize, k: usize, noise: f64) -> UserSet {
    UserSet::grouped(vec![vec![[0.0; 3]; k]; groups], noise).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Minimiser of `|x - v|^2` over `{x >= 0, sum x = total}` (or `<= total`) by a
/// zooming grid search: an 11-point-per-axis grid is searched, then re-centred
/// on the incumbent with a five times finer step. The objective is convex, so
/// the search localises the minimiser far below `1e-4`.
pub fn grid_projection(v: &[f64], total: f64, equality: bool) -> Vec<f64> {
    let d = v.len();
    let free = if equality { d - 1 } else { d };
    let complete = |x: &[f64]| -> Option<Vec<f64>> {
        let s: f64 = x.iter().sum();
        if x.iter().any(|&c| c < 0.0) || s > total * (1.0 + 1e-12) {
            return None;
        }
        let mut full = x.to_vec();
        if equality {
            full.push((total - s).max(0.0));
        }
        Some(full)
    };
    let cost = |x: &[f64]| x.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let mut centre = vec![total / d as f64; free];
    let mut half = total;
    let steps = 10;
    let mut best = complete(&centre).unwrap();
    for _ in 0..12 {
        let h = 2.0 * half / steps as f64;
        let mut idx = vec![0usize; free];
        loop {
            let x: Vec<f64> = (0..free)
                .map(|i| centre[i] - half + h * idx[i] as f64)
                .collect();
            if let Some(full) = complete(&x) {
                if cost(&full) < cost(&best) {
                    best = full;
                }
            }
            let mut i = 0;
            while i < free {
                idx[i] += 1;
                if idx[i] <= steps {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == free {
                break;
            }
        }
        centre = best[..free].to_vec();
        half = 2.0 * h;
    }
    best
}

/// Two waveguides, two antennas each, eight grid points, one user per group.
pub fn micro_config() -> SystemConfig {
    SystemConfig {
        num_waveguides: 2,
        pas_per_waveguide: 2,
        grid_size: 8,
        ..SystemConfig::default()
    }
    .with_groups(2, 1)
}

/// Best true objective over every admissible layout and a 50 x 50 power grid.
pub fn exhaustive_division_optimum(cfg: &SystemConfig, users: &UserSet) -> f64 {
    use pinch_multicast::layout::PinchLayout;
    use pinch_multicast::rates::sinr_all;
    use pinch_multicast::wd::WdSolver;
    use pinch_multicast::Beamformer;

    let solver = WdSolver::new(cfg, users).unwrap();
    let l = cfg.grid_size;
    let pairs: Vec<Vec<usize>> = (0..l)
        .flat_map(|i| (i + 1..l).map(move |j| vec![i, j]))
        .collect();
    let levels: Vec<f64> = (0..50).map(|i| cfg.total_power * i as f64 / 49.0).collect();
    let mut best = f64::NEG_INFINITY;
    for r0 in &pairs {
        for r1 in &pairs {
            let Ok(layout) = PinchLayout::from_indices(cfg, vec![r0.clone(), r1.clone()]) else {
                continue;
            };
            let h = solver.channels(&layout);
            for &p0 in &levels {
                for &p1 in &levels {
                    if p0 + p1 > cfg.total_power * (1.0 + 1e-12) {
                        continue;
                    }
                    let f = sinr_all(&Beamformer::diagonal(&[p0, p1]), &h, users)
                        .unwrap()
                        .objective;
                    best = best.max(f);
                }
            }
        }
    }
    best
}

/// Element update by rebuilding the channels from scratch for every candidate;
/// `score` maps the recomputed channels to the placement objective.
pub fn naive_element_scan(
    cfg: &SystemConfig,
    users: &UserSet,
    layout: &pinch_multicast::layout::PinchLayout,
    m: usize,
    n: usize,
    score: impl Fn(&EffectiveChannels) -> f64,
) -> usize {
    use pinch_multicast::channel::effective_channels;
    use pinch_multicast::layout::{candidate_set, PinchLayout};
    use pinch_multicast::radiation::radiation_profile;

    let eval = |idx: usize| -> f64 {
        let mut rows: Vec<Vec<usize>> = (0..layout.num_waveguides())
            .map(|w| layout.indices(w).to_vec())
            .collect();
        rows[m][n] = idx;
        let l = PinchLayout::from_indices(cfg, rows).unwrap();
        let profile = radiation_profile(&l, cfg).unwrap();
        score(&effective_channels(&l, &profile, users, cfg).unwrap())
    };
    let current = layout.indices(m)[n];
    let current_value = eval(current);
    let mut best: Option<(usize, f64)> = None;
    for c in candidate_set(layout, m, n, cfg.min_spacing()) {
        let v = eval(c);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((c, v));
        }
    }
    match best {
        Some((c, v)) if v >= current_value => c,
        _ => current,
    }
}

/// Sum over groups of the minimum SINR under a diagonal allocation.
pub fn division_sinr_score(h: &EffectiveChannels, users: &UserSet, power: &[f64]) -> f64 {
    use pinch_multicast::rates::sinr_all;
    use pinch_multicast::Beamformer;
    let r = sinr_all(&Beamformer::diagonal(power), h, users).unwrap();
    (0..users.num_groups())
        .map(|g| {
            users
                .members(g)
                .iter()
                .map(|&u| r.sinr[u])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Maximiser of the surrogate max-min objective over `{||W||_F^2 <= budget}` by
/// normalised projected subgradient ascent, returning the best value seen.
pub fn surrogate_subgradient_search(
    coeffs: &pinch_multicast::wm::SurrogateCoeffs,
    h: &EffectiveChannels,
    users: &UserSet,
    budget: f64,
    start: &pinch_multicast::Beamformer,
    iterations: usize,
) -> f64 {
    use pinch_multicast::wm::{surrogate_objective, surrogate_rates};
    use pinch_multicast::Beamformer;

    let (feeds, groups) = (h.num_feeds(), users.num_groups());
    let radius = budget.sqrt();
    let mut w = start.clone();
    let mut best = surrogate_objective(&w, coeffs, h, users);
    for t in 1..=iterations {
        let rates = surrogate_rates(&w, coeffs, h, users);
        let mut grad = DMatrix::<Complex64>::zeros(feeds, groups);
        for g in 0..groups {
            let &u = users
                .members(g)
                .iter()
                .min_by(|&&x, &&y| rates[x].total_cmp(&rates[y]))
                .unwrap();
            let row: Vec<Complex64> = (0..feeds).map(|m| h.get(u, m)).collect();
            for i in 0..groups {
                let amp: Complex64 = (0..feeds).map(|m| row[m] * w.w[(m, i)]).sum();
                for m in 0..feeds {
                    let mut d = -row[m].conj() * amp * coeffs.b[u];
                    if i == g {
                        d += coeffs.a[u].conj() * row[m].conj();
                    }
                    grad[(m, i)] += d * 2.0;
                }
            }
        }
        let norm = grad.norm();
        if norm == 0.0 {
            break;
        }
        let step = 0.5 * radius / (t as f64).sqrt();
        let mut next = &w.w + grad * Complex64::new(step / norm, 0.0);
        let p = next.norm();
        if p > radius {
            next *= Complex64::new(radius / p, 0.0);
        }
        w = Beamformer::dense(next);
        best = best.max(surrogate_objective(&w, coeffs, h, users));
    }
    best
}
