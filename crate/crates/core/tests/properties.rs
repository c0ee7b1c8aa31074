mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinch_multicast::channel::{EffectiveChannels, UserSet};
use pinch_multicast::experiments::round_sig;
use pinch_multicast::layout::{candidate_set, PinchLayout};
use pinch_multicast::projection::{project_power, project_simplex};
use pinch_multicast::radiation::{radiation_equal, radiation_proportional, RadiationStatus};
use pinch_multicast::rates::{sinr_all, soft_min, soft_min_weights};
use pinch_multicast::wm::{surrogate_coeffs, surrogate_rates};
use pinch_multicast::{Beamformer, SystemConfig};
use proptest::prelude::*;
use rand::SeedableRng;

fn vector(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, len)
}

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        DMatrix::from_iterator(
            rows,
            cols,
            v.into_iter().map(|(re, im)| Complex64::new(re, im)),
        )
    })
}

proptest! {
    #[test]
    fn simplex_projection_is_optimal(v in vector(1..=6), total in 0.1..5.0f64) {
        let x = project_simplex(&v, total);
        prop_assert!(x.iter().all(|&c| c >= 0.0));
        prop_assert!((x.iter().sum::<f64>() - total).abs() <= 1e-12 * total.max(1.0));
        // KKT: active coordinates share the threshold, inactive ones lie below it.
        let active: Vec<f64> = x.iter().zip(&v).filter(|(c, _)| **c > 0.0).map(|(c, vi)| vi - c).collect();
        let theta = active[0];
        prop_assert!(active.iter().all(|t| (t - theta).abs() <= 1e-9));
        prop_assert!(x.iter().zip(&v).filter(|(c, _)| **c == 0.0).all(|(_, vi)| *vi <= theta + 1e-9));
        let again = project_simplex(&x, total);
        prop_assert!(again.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-12));
    }

    #[test]
    fn power_projection_is_feasible_and_idempotent(v in vector(1..=6), budget in 0.1..5.0f64) {
        let p = project_power(&v, budget);
        prop_assert!(p.iter().all(|&c| c >= 0.0));
        prop_assert!(p.iter().sum::<f64>() <= budget * (1.0 + 1e-12));
        let again = project_power(&p, budget);
        prop_assert!(again.iter().zip(&p).all(|(a, b)| (a - b).abs() <= 1e-12));
    }

    #[test]
    fn soft_min_sandwich(v in prop::collection::vec(0.0..20.0f64, 1..=6), tau in 1.0..1000.0f64) {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let s = soft_min(&v, tau);
        prop_assert!(s <= lo + 1e-12);
        prop_assert!(s >= lo - (v.len() as f64).ln() / tau - 1e-12);
        let w = soft_min_weights(&v, tau);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sinr_is_invariant_to_joint_noise_and_gain_scaling(
        h in complex_matrix(4, 2),
        w in complex_matrix(2, 2),
        c in 1e-6..1e6f64,
    ) {
        let users = UserSet::grouped(vec![vec![[0.0; 3]; 2]; 2], 0.3).unwrap();
        let scaled_users = UserSet::grouped(vec![vec![[0.0; 3]; 2]; 2], 0.3 * c).unwrap();
        let bf = Beamformer::dense(w);
        let a = sinr_all(&bf, &EffectiveChannels::new(h.clone()), &users).unwrap();
        let b = sinr_all(&bf, &EffectiveChannels::new(h).scaled(c.sqrt()), &scaled_users).unwrap();
        for (x, y) in a.sinr.iter().zip(&b.sinr) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn surrogate_is_a_tight_minorizer(
        h in complex_matrix(4, 2),
        w0 in complex_matrix(2, 2),
        w in complex_matrix(2, 2),
    ) {
        let users = UserSet::grouped(vec![vec![[0.0; 3]; 2]; 2], 0.2).unwrap();
        let h = EffectiveChannels::new(h);
        let (b0, b) = (Beamformer::dense(w0), Beamformer::dense(w));
        let coeffs = surrogate_coeffs(&b0, &h, &users).unwrap();
        let at_anchor = surrogate_rates(&b0, &coeffs, &h, &users);
        for (s, r) in at_anchor.iter().zip(&sinr_all(&b0, &h, &users).unwrap().rate) {
            prop_assert!((s - r).abs() <= 1e-8);
        }
        for (s, r) in surrogate_rates(&b, &coeffs, &h, &users).iter().zip(&sinr_all(&b, &h, &users).unwrap().rate) {
            prop_assert!(*s <= r + 1e-9);
        }
    }

    #[test]
    fn radiation_rows_conserve_power(
        gaps in prop::collection::vec(0.0..3.0f64, 1..=8),
        eps in 0.0..0.2f64,
    ) {
        let xs: Vec<f64> = gaps.iter().scan(0.0, |acc, g| { *acc += g; Some(*acc) }).collect();
        let n = xs.len() as f64;
        let eq = radiation_equal(1.0, 0.9, &xs, eps).unwrap();
        prop_assert!(eq.power.iter().all(|&p| p == 0.9 / n));
        let prop_row = radiation_proportional(1.0, 0.9, &xs, eps).unwrap();
        prop_assert!(prop_row.power.iter().all(|&p| p >= 0.0));
        prop_assert!(prop_row.coefficient.iter().all(|&a| (0.0..=1.0).contains(&a)));
        match prop_row.status {
            RadiationStatus::Shortfall => prop_assert!(prop_row.total() < 0.9),
            _ => prop_assert!((prop_row.total() - 0.9).abs() <= 1e-10),
        }
    }

    #[test]
    fn random_layouts_respect_spacing_and_candidates_keep_it(seed in 0u64..1000) {
        let cfg = SystemConfig { grid_size: 200, ..SystemConfig::default() };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let layout = PinchLayout::random(&cfg, &mut rng).unwrap();
        prop_assert!(layout.validate(cfg.min_spacing()).is_ok());
        for m in 0..cfg.num_waveguides {
            for n in 0..cfg.pas_per_waveguide {
                for c in candidate_set(&layout, m, n, cfg.min_spacing()) {
                    let mut rows: Vec<Vec<usize>> = (0..cfg.num_waveguides).map(|j| layout.indices(j).to_vec()).collect();
                    rows[m][n] = c;
                    prop_assert!(PinchLayout::from_indices(&cfg, rows).is_ok());
                }
            }
        }
    }

    #[test]
    fn nine_digit_rounding_survives_text(x in -1e6..1e6f64) {
        let r = round_sig(x);
        prop_assert_eq!(round_sig(r), r);
        prop_assert_eq!(format!("{r:.8e}").parse::<f64>().unwrap(), r);
        prop_assert!((r - x).abs() <= 1e-8 * x.abs().max(1e-300));
    }
}
