//! Experiment plumbing: state files, run configuration, reports and the
//! command-line driver behind the `purity` binary.

pub mod cli;
pub mod config;
pub mod report;
pub mod state_file;

pub use cli::{run, run_subcommand, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
pub use config::{Command, Format, RunConfig};
pub use report::{round_sig, Number, Report};
pub use state_file::{density_to_json, ingest, joint_to_json, parse_state, StateInput, SCHEMA_VERSION};
