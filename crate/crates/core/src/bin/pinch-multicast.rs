use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pinch_multicast::experiments::{
    load_scenario, run_scenario, write_csv, write_csv_to, Architecture, RunOptions, Scenario,
    PRESET_NAMES,
};
use pinch_multicast::RadiationModel;

#[derive(Parser)]
#[command(version, about = "Pinching-antenna multigroup multicast simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig3 ... fig9) or a TOML scenario file and write CSV rows.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; rows go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of wd, wm, conv, massive.
        #[arg(long, value_delimiter = ',')]
        arch: Option<Vec<Architecture>>,
        #[arg(long)]
        radiation: Option<RadiationModel>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Record per-solve wall time in the wall_ms column.
        #[arg(long)]
        timing: bool,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Parse and validate a scenario file.
    ValidateConfig { path: PathBuf },
}

fn resolve(name: &str) -> pinch_multicast::Result<Scenario> {
    match Scenario::preset(name) {
        Some(s) => Ok(s),
        None => load_scenario(Path::new(name)),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListScenarios => {
            for name in PRESET_NAMES {
                let s = Scenario::preset(name).expect("preset");
                let arch: Vec<&str> = s.architectures.iter().map(|a| a.as_str()).collect();
                println!(
                    "{name}\tsweep={:?}\tvalues={:?}\tarch={}\ttrials={}",
                    s.sweep,
                    s.values,
                    arch.join(","),
                    s.trials
                );
            }
            ExitCode::SUCCESS
        }
        Command::ValidateConfig { path } => match load_scenario(&path) {
            Ok(s) => {
                println!(
                    "ok: scenario '{}' with {} sweep values",
                    s.name,
                    s.values.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Run {
            scenario,
            trials,
            seed,
            out,
            arch,
            radiation,
            threads,
            timing,
        } => {
            let mut s = match resolve(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(t) = trials {
                s.trials = t;
            }
            if let Some(v) = seed {
                s.seed = v;
            }
            if let Some(a) = arch {
                s.architectures = a;
            }
            if let Some(r) = radiation {
                s.radiation_models = vec![r];
            }
            let rows = match run_scenario(&s, RunOptions { threads, timing }) {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let written = match &out {
                Some(path) => write_csv(&rows, path),
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    write_csv_to(&rows, &mut lock).and_then(|_| lock.flush().map_err(Into::into))
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            let failed = rows.iter().filter(|r| r.is_failed()).count();
            if failed > 0 {
                eprintln!("{failed} of {} solves failed", rows.len());
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
    }
}
