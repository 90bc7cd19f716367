//! Configuration-driven scenario runner behind the command-line tool.

pub mod config;
pub mod output;
pub mod run;

pub use config::{OutputFormat, RunConfig, Scenario};
pub use output::{artifact_stem, emit_outputs, record_json};
pub use run::{run_scenario, OutputRecord, Table, ARTIFACT_VERSION};
