mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinch_multicast::channel::{EffectiveChannels, UserSet};
use pinch_multicast::rates::{
    division_rates, group_minima, lse_gradient, lse_value, objective, sinr_all, soft_min,
    soft_min_weights,
};
use pinch_multicast::{Beamformer, Error};
use rand::Rng;
use std::f64::consts::LN_2;

fn random_dense<R: Rng>(rng: &mut R, feeds: usize, groups: usize) -> Beamformer {
    Beamformer::dense(DMatrix::from_fn(feeds, groups, |_, _| {
        common::cplx(rng, 1.0)
    }))
}

fn fd_gradient(p: &[f64], h: &EffectiveChannels, users: &UserSet, tau: f64) -> Vec<f64> {
    let step = 1e-6 * p.iter().copied().fold(1.0, f64::max);
    (0..p.len())
        .map(|i| {
            let (mut hi, mut lo) = (p.to_vec(), p.to_vec());
            hi[i] += step;
            lo[i] -= step;
            (lse_value(&hi, h, users, tau).unwrap() - lse_value(&lo, h, users, tau).unwrap())
                / (2.0 * step)
        })
        .collect()
}

#[test]
fn single_group_has_no_interference() {
    let mut rng = common::rng(1);
    let users = common::abstract_users(1, 3, 0.5);
    let h = common::random_channels(&mut rng, 3, 2, 1.0);
    let w = random_dense(&mut rng, 2, 1);
    let r = sinr_all(&w, &h, &users).unwrap();
    for u in 0..3 {
        let a = h.get(u, 0) * w.w[(0, 0)] + h.get(u, 1) * w.w[(1, 0)];
        assert!(common::rel_err(r.sinr[u], a.norm_sqr() / 0.5) < 1e-14);
        assert_eq!(r.interference[u], 0.0);
    }
}

#[test]
fn zero_beamformer_gives_zero_rates() {
    let mut rng = common::rng(2);
    let users = common::abstract_users(2, 2, 1e-12);
    let h = common::random_channels(&mut rng, 4, 3, 1e-3);
    let r = sinr_all(&Beamformer::zeros(3, 2), &h, &users).unwrap();
    assert!(r.sinr.iter().all(|&s| s == 0.0));
    assert_eq!(r.objective, 0.0);
}

#[test]
fn zero_noise_and_interference_is_guarded() {
    let users = common::abstract_users(2, 1, 0.0);
    let h = EffectiveChannels::new(DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0)));
    let w = Beamformer::diagonal(&[1.0, 0.0]);
    assert!(matches!(
        sinr_all(&w, &h, &users),
        Err(Error::DivisionGuard(0))
    ));
}

#[test]
fn two_group_scalar_expansion() {
    let mut rng = common::rng(3);
    let users = common::abstract_users(2, 2, 0.3);
    for _ in 0..20 {
        let h = common::random_channels(&mut rng, 4, 2, 1.0);
        let w = random_dense(&mut rng, 2, 2);
        let r = sinr_all(&w, &h, &users).unwrap();
        for u in 0..4 {
            let g = users.group_of(u);
            let o = 1 - g;
            let (h1, h2) = (h.get(u, 0), h.get(u, 1));
            let sig = h1 * w.w[(0, g)] + h2 * w.w[(1, g)];
            let int = h1 * w.w[(0, o)] + h2 * w.w[(1, o)];
            let sinr =
                (sig.re * sig.re + sig.im * sig.im) / (int.re * int.re + int.im * int.im + 0.3);
            assert!(common::rel_err(r.sinr[u], sinr) < 1e-13);
            assert!(common::rel_err(r.rate[u], (1.0 + sinr).log2()) < 1e-13);
        }
    }
}

#[test]
fn one_user_per_group_objective_is_rate_sum() {
    let mut rng = common::rng(4);
    let users = common::abstract_users(3, 1, 1.0);
    let h = common::random_channels(&mut rng, 3, 3, 1.0);
    let w = random_dense(&mut rng, 3, 3);
    let r = sinr_all(&w, &h, &users).unwrap();
    assert!((r.objective - r.rate.iter().sum::<f64>()).abs() < 1e-14);
}

#[test]
fn duplicated_user_leaves_objective_unchanged() {
    let mut rng = common::rng(5);
    let h = common::random_channels(&mut rng, 4, 2, 1.0);
    let users = common::abstract_users(2, 2, 0.7);
    let w = random_dense(&mut rng, 2, 2);
    let base = objective(&w, &h, &users).unwrap();

    // Append a copy of user 1 (group 0) to group 0.
    let mut hhat = h.hhat.clone().insert_row(4, Complex64::new(0.0, 0.0));
    for m in 0..2 {
        hhat[(4, m)] = h.get(1, m);
    }
    let users2 = UserSet::new(vec![[0.0; 3]; 5], vec![0, 0, 1, 1, 0], vec![0.7; 5]).unwrap();
    let f = objective(&w, &EffectiveChannels::new(hhat), &users2).unwrap();
    assert_eq!(f, base);
}

#[test]
fn objective_matches_enumerated_minima() {
    let mut rng = common::rng(6);
    let users = common::abstract_users(4, 3, 0.2);
    for _ in 0..20 {
        let h = common::random_channels(&mut rng, 12, 4, 1.0);
        let w = random_dense(&mut rng, 4, 4);
        let r = sinr_all(&w, &h, &users).unwrap();
        let mut brute = 0.0;
        for g in 0..4 {
            let mut best = f64::INFINITY;
            for u in 0..12 {
                if users.group_of(u) == g && r.rate[u] < best {
                    best = r.rate[u];
                }
            }
            brute += best;
        }
        assert_eq!(r.objective, brute);
        assert_eq!(group_minima(&r.rate, &users), r.group_min);
    }
}

#[test]
fn lse_closed_forms() {
    assert!((soft_min(&[1.0, 1.0], 100.0) - (1.0 - LN_2 / 100.0)).abs() < 1e-15);
    assert!((soft_min(&[1.0, 1.0], 100.0) - 0.99307).abs() < 1e-5);
    assert!((soft_min(&[0.5, 2.0], 1e6) - 0.5).abs() < 1e-5);
    assert_eq!(soft_min(&[1.7], 100.0), 1.7);
    assert_eq!(
        soft_min_weights(&[2.0, 2.0, 2.0], 100.0),
        vec![1.0 / 3.0; 3]
    );
    // Large shifts must not overflow.
    assert!(soft_min(&[1e4, 1e4 + 1.0], 1e3).is_finite());
}

#[test]
fn lse_single_user_group_is_exact() {
    let mut rng = common::rng(7);
    let users = common::abstract_users(2, 1, 1.0);
    let h = common::random_channels(&mut rng, 2, 2, 1.0);
    let p = [0.4, 0.6];
    let rates = division_rates(&p, &h, &users).unwrap();
    assert!((lse_value(&p, &h, &users, 100.0).unwrap() - rates.iter().sum::<f64>()).abs() < 1e-14);
}

#[test]
fn lse_lower_bounds_the_minimum() {
    let mut rng = common::rng(8);
    let users = common::abstract_users(3, 3, 1.0);
    for _ in 0..20 {
        let h = common::random_channels(&mut rng, 9, 3, 1.0);
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
        let exact: f64 = group_minima(&division_rates(&p, &h, &users).unwrap(), &users)
            .iter()
            .sum();
        let smooth = lse_value(&p, &h, &users, 100.0).unwrap();
        assert!(smooth <= exact + 1e-12);
        assert!(exact - smooth <= 3.0 * 3f64.ln() / 100.0 + 1e-12);
    }
}

#[test]
fn single_group_gradient_by_hand() {
    let mut rng = common::rng(9);
    let users = common::abstract_users(1, 2, 0.5);
    let h = common::random_channels(&mut rng, 2, 1, 1.0);
    let p = [0.8];
    let rates = division_rates(&p, &h, &users).unwrap();
    let w = soft_min_weights(&rates, 100.0);
    let expect: f64 = (0..2)
        .map(|u| {
            let g = h.get(u, 0).norm_sqr();
            w[u] * g / (LN_2 * (0.5 + g * p[0]))
        })
        .sum();
    let grad = lse_gradient(&p, &h, &users, 100.0).unwrap();
    assert!(common::rel_err(grad[0], expect) < 1e-13);
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = common::rng(10);
    for _ in 0..30 {
        let groups = rng.random_range(2..=4);
        let k = rng.random_range(1..=3);
        let users = common::abstract_users(groups, k, rng.random_range(0.1..1.0));
        let h = common::random_channels(&mut rng, groups * k, groups, 1.0);
        let p: Vec<f64> = (0..groups).map(|_| rng.random_range(0.05..1.0)).collect();
        let tau = 10.0;
        let g = lse_gradient(&p, &h, &users, tau).unwrap();
        let fd = fd_gradient(&p, &h, &users, tau);
        let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * scale, "{a} vs {b}");
        }
    }
}
