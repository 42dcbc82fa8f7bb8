//! Figure presets: ordinary scenario files embedded at build time.

use crate::config::{validate_config, ScenarioConfig};
use crate::error::CliError;

/// Name and TOML text of every preset, in figure order.
pub const PRESETS: [(&str, &str); 10] = [
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("fig6a", include_str!("../presets/fig6a.toml")),
    ("fig6b", include_str!("../presets/fig6b.toml")),
    ("fig6c", include_str!("../presets/fig6c.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9a", include_str!("../presets/fig9a.toml")),
    ("fig9b", include_str!("../presets/fig9b.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Option<Result<ScenarioConfig, CliError>> {
    preset_text(name).map(validate_config)
}
