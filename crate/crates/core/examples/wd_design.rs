//! Waveguide-division design: one group per waveguide, power split plus
//! element-wise antenna placement.

use pinch_multicast::experiments::{sample_users, UserDistribution};
use pinch_multicast::wd::{WdSolver, WdState};
use pinch_multicast::{watts_to_dbm, SystemConfig};

fn main() -> pinch_multicast::Result<()> {
    let cfg = SystemConfig::default();
    let users = sample_users(&cfg, UserDistribution::Uniform, 7)?;
    let solver = WdSolver::new(&cfg, &users)?;
    let out = solver.run(WdState::initial(&cfg)?)?;

    println!(
        "objective {:.4} bps/Hz after {} rounds (converged: {})",
        out.report.objective, out.state.iteration, out.converged
    );
    for (g, (p, r)) in out
        .state
        .power
        .iter()
        .zip(&out.report.group_min)
        .enumerate()
    {
        println!(
            "group {g}: {:6.2} dBm, min rate {r:.3}, antennas at {:.2?}",
            watts_to_dbm(*p),
            out.state.layout.positions(g)
        );
    }
    println!("{} candidate positions evaluated", out.evaluations);
    Ok(())
}
