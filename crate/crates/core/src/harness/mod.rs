//! Command-line surface: scenario files, commands and scenario generation.

mod commands;
mod generate;
mod scenario;

pub use commands::{
    cmd_figures, cmd_probe, cmd_run, cmd_selfcheck, parse_range, CommandOutput, ProbeArgs,
    ProbeEquation, DEFAULT_PROBE_SEED, DEFAULT_TRIALS, EXIT_ERROR, EXIT_OK, EXIT_REJECTED,
};
pub use generate::{random_honest_scenario, ScenarioBounds};
pub use scenario::{parse_scenario, ScenarioError};
