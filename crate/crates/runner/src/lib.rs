//! Config-driven scenarios on top of `b4nl`: strict JSON configs, CSV/JSON
//! outputs and a manifest per run.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ScenarioConfig, ScenarioKind};
pub use error::{RunError, RunResult};
pub use run::{run_scenario, RunOptions, RunSummary};
