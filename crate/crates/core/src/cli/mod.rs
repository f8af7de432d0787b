//! Batch front end: configuration parsing and the command runner.

mod config;
mod run;

pub use config::{parse_config, Bounds, ExplicitModel, ModelSource, RunConfig, COMMANDS};
pub use run::{run, run_text, verify, RunOutcome, Status};
