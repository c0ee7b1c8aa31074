//! Monte Carlo sweeps over user drops, with CSV output.

pub mod config_file;
pub mod csv_io;
pub mod runner;
pub mod sampling;
pub mod scenario;

pub use config_file::{load_scenario, parse_scenario};
pub use csv_io::{read_csv, read_csv_from, write_csv, write_csv_to, HEADER};
pub use runner::{mean_objective, round_sig, run_scenario, sort_rows, ResultRow, RunOptions};
pub use sampling::{sample_users, trial_seed};
pub use scenario::{Architecture, Scenario, SweepVariable, UserDistribution, PRESET_NAMES};
