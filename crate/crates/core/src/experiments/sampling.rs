use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::UserSet;
use crate::config::SystemConfig;
use crate::error::Result;

use super::scenario::UserDistribution;

/// Deterministic per-trial seed from the scenario root seed (SplitMix64 finaliser).
pub fn trial_seed(root: u64, trial: usize) -> u64 {
    let mut z = root
        ^ (trial as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(root: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(root, trial))
}

/// Draws user positions on the ground plane from an existing stream.
pub fn sample_users_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    distribution: UserDistribution,
    rng: &mut R,
) -> Result<UserSet> {
    let g = cfg.num_groups;
    let groups = cfg
        .users_per_group
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (lo, hi) = match distribution {
                UserDistribution::Uniform => (0.0, cfg.region_x),
                UserDistribution::GeographicallySeparated => (
                    i as f64 * cfg.region_x / g as f64,
                    (i + 1) as f64 * cfg.region_x / g as f64,
                ),
            };
            (0..k)
                .map(|_| {
                    [
                        rng.random_range(lo..=hi),
                        rng.random_range(0.0..=cfg.region_y),
                        0.0,
                    ]
                })
                .collect()
        })
        .collect();
    UserSet::grouped(groups, cfg.noise_power)
}

/// Draws user positions from a fresh stream seeded with `seed`.
pub fn sample_users(
    cfg: &SystemConfig,
    distribution: UserDistribution,
    seed: u64,
) -> Result<UserSet> {
    sample_users_with(cfg, distribution, &mut ChaCha8Rng::seed_from_u64(seed))
}
