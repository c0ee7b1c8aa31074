//! Fixed-array MIMO baselines against the two pinching architectures on the
//! same user drop.

use pinch_multicast::baselines::{baseline_multicast_solve, fixed_array_channels, FixedArray};
use pinch_multicast::experiments::{sample_users, UserDistribution};
use pinch_multicast::wd::{WdSolver, WdState};
use pinch_multicast::wm::WmSolver;
use pinch_multicast::SystemConfig;

fn main() -> pinch_multicast::Result<()> {
    let cfg = SystemConfig::default();
    let users = sample_users(&cfg, UserDistribution::Uniform, 11)?;

    for array in [FixedArray::conventional(&cfg), FixedArray::massive(&cfg)] {
        let h = fixed_array_channels(&array, &users, &cfg)?;
        let out = baseline_multicast_solve(&h, &users, &cfg)?;
        println!(
            "{:?} array, {} RF chains: {:.4} bps/Hz",
            array.kind,
            array.num_rf(),
            out.report.objective
        );
    }

    let wd = WdSolver::new(&cfg, &users)?.run(WdState::initial(&cfg)?)?;
    println!("pinching WD: {:.4} bps/Hz", wd.report.objective);
    let solver = WmSolver::new(&cfg, &users)?;
    let wm = solver.run(solver.initial_state()?)?;
    println!("pinching WM: {:.4} bps/Hz", wm.report.objective);
    Ok(())
}
