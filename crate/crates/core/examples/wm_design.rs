//! Waveguide-multiplexing design: every waveguide serves all groups through a
//! digital beamformer, refined by minorize-maximize rounds.

use pinch_multicast::experiments::{sample_users, UserDistribution};
use pinch_multicast::wm::WmSolver;
use pinch_multicast::SystemConfig;

fn main() -> pinch_multicast::Result<()> {
    let cfg = SystemConfig::default();
    let users = sample_users(&cfg, UserDistribution::Uniform, 7)?;
    let solver = WmSolver::new(&cfg, &users)?;
    let out = solver.run(solver.initial_state()?)?;

    println!(
        "objective {:.4} bps/Hz after {} rounds ({} dual iterations, converged: {})",
        out.report.objective, out.state.iteration, out.pagd_iterations, out.converged
    );
    println!("group minimum rates: {:.3?}", out.report.group_min);
    let w = &out.state.beamformer;
    println!(
        "beamformer power {:.3e} W of {:.3e} W",
        w.power(),
        cfg.total_power
    );
    for g in 0..cfg.num_groups {
        let norms: Vec<String> =
            w.w.column(g)
                .iter()
                .map(|c| format!("{:.2e}", c.norm()))
                .collect();
        println!("group {g} feed amplitudes: {}", norms.join(" "));
    }
    Ok(())
}
