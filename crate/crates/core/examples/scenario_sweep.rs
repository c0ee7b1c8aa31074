//! A small Monte Carlo power sweep written as CSV to stdout, with a per-point
//! summary on stderr.

use pinch_multicast::experiments::{
    mean_objective, run_scenario, write_csv_to, Architecture, RunOptions, Scenario, SweepVariable,
};

fn main() -> pinch_multicast::Result<()> {
    let mut scenario = Scenario::preset("fig4").expect("built-in preset");
    scenario.name = "power-sweep".into();
    scenario.sweep = SweepVariable::Power;
    scenario.values = vec![-10.0, 0.0, 10.0];
    scenario.architectures = vec![Architecture::Wd, Architecture::Conventional];
    scenario.trials = 3;
    scenario.validate()?;

    let rows = run_scenario(&scenario, RunOptions::default())?;
    write_csv_to(&rows, std::io::stdout().lock())?;

    for &v in &scenario.values {
        for &arch in &scenario.architectures {
            let mean = mean_objective(&rows, |r| r.sweep_value == v && r.architecture == arch);
            eprintln!(
                "{v:>6} dBm {:>14}: {:.3}",
                arch.as_str(),
                mean.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
