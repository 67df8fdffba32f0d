//! Experiment harness for `meanfield-core`: run configuration, trap-release
//! scenarios on a shared clock, particle-number sweeps with log-log rate
//! fits, the exact identity suite, and CSV/JSON/gnuplot output.

pub mod config;
pub mod error;
pub mod identities;
pub mod output;
pub mod scenario;
pub mod sweep;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::{LabError, Result};
pub use scenario::{run_scenario, ScenarioRun};
pub use sweep::{sweep_and_fit, RateReport, Sweep};
