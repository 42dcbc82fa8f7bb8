//! Scenario runner for terahertz turbulence channel sweeps.
//!
//! A scenario file names one computation, fixes the link, array and
//! turbulence inputs, and declares one sweep axis plus optional series.
//! [`run_scenario`] evaluates it into a [`SweepTable`], which [`emit`] writes
//! as CSV or JSON.

pub mod config;
pub mod emit;
pub mod error;
pub mod presets;
pub mod run;
pub mod sweep;
pub mod table;

use std::path::Path;

pub use config::{validate_config, validate_config_for, Computation, OutputFormat, ScenarioConfig};
pub use emit::{emit, parse_json, read_json, render};
pub use error::{CliError, ConfigIssue};
pub use run::run_scenario;
pub use table::{Cell, Column, SweepTable, TableMeta};

/// Resolves the command-line target: a preset name (which supplies its own
/// scenario) or a computation name read together with `config`.
pub fn resolve(target: &str, config: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    if let Some(text) = presets::preset_text(target) {
        if config.is_some() {
            return Err(CliError::Validation(vec![ConfigIssue {
                key: "--config".into(),
                line: None,
                message: format!("preset `{target}` supplies its own scenario; copy it from presets/ to customise"),
            }]));
        }
        return validate_config(text);
    }
    let Some(computation) = Computation::from_name(target) else {
        return Err(CliError::UnknownComputation(target.to_string()));
    };
    let Some(path) = config else {
        return Err(CliError::Validation(vec![ConfigIssue {
            key: "--config".into(),
            line: None,
            message: format!("computation `{target}` needs a scenario file"),
        }]));
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    validate_config_for(&text, Some(computation))
}
