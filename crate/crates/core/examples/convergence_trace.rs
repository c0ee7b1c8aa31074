//! Objective per alternating round for both architectures from a random start.

use pinch_multicast::experiments::{sample_users, UserDistribution};
use pinch_multicast::wd::{WdSolver, WdState};
use pinch_multicast::wm::WmSolver;
use pinch_multicast::SystemConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pinch_multicast::Result<()> {
    let cfg = SystemConfig::default();
    let users = sample_users(&cfg, UserDistribution::Uniform, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let wd = WdSolver::new(&cfg, &users)?.run(WdState::random(&cfg, &mut rng)?)?;
    let solver = WmSolver::new(&cfg, &users)?;
    let wm = solver.run(solver.random_state(&mut rng)?)?;

    println!("round      wd      wm");
    let rounds = wd.state.trace.len().max(wm.state.trace.len());
    // Finished runs hold their last value.
    let at = |t: &[f64], i: usize| t.get(i).or(t.last()).copied().unwrap_or(f64::NAN);
    for i in 0..rounds {
        println!(
            "{i:5} {:7.3} {:7.3}",
            at(&wd.state.trace, i),
            at(&wm.state.trace, i)
        );
    }
    Ok(())
}
