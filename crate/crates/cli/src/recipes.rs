//! Built-in figure recipes. Every recipe is one or more preset config files
//! kept as plain TOML under `presets/`, so reproducing a figure is the same
//! as running its presets.

use crate::config::ConfigFile;
use crate::error::CliError;

pub const FIGURES: [&str; 10] = ["fig2", "fig3", "fig4", "fig5", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"];

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5_gamma1", include_str!("../presets/fig5_gamma1.toml")),
    ("fig5_gamma0.01", include_str!("../presets/fig5_gamma0.01.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig10_sgd", include_str!("../presets/fig10_sgd.toml")),
    ("fig10_sgld", include_str!("../presets/fig10_sgld.toml")),
    ("fig11_d2", include_str!("../presets/fig11_d2.toml")),
    ("fig11_d3", include_str!("../presets/fig11_d3.toml")),
    ("fig11_d5", include_str!("../presets/fig11_d5.toml")),
    ("fig11_d10", include_str!("../presets/fig11_d10.toml")),
    ("fig11_d20", include_str!("../presets/fig11_d20.toml")),
    ("fig11_d30", include_str!("../presets/fig11_d30.toml")),
    ("fig12_d5", include_str!("../presets/fig12_d5.toml")),
    ("fig12_d25", include_str!("../presets/fig12_d25.toml")),
    ("fig12_d50", include_str!("../presets/fig12_d50.toml")),
];

/// Preset names making up `figure`, in run order.
pub fn preset_names(figure: &str) -> Result<Vec<&'static str>, CliError> {
    if !FIGURES.contains(&figure) {
        return Err(CliError::Usage(format!(
            "unknown figure `{figure}`; expected one of {}",
            FIGURES.join(", ")
        )));
    }
    Ok(PRESETS
        .iter()
        .map(|(name, _)| *name)
        .filter(|name| *name == figure || name.strip_prefix(figure).is_some_and(|rest| rest.starts_with('_')))
        .collect())
}

/// TOML text of a preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn preset(name: &str) -> Result<ConfigFile, CliError> {
    let text = preset_text(name).ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`")))?;
    ConfigFile::parse(text, &format!("preset {name}"))
}

/// The parsed presets of `figure`.
pub fn configs(figure: &str) -> Result<Vec<ConfigFile>, CliError> {
    preset_names(figure)?.into_iter().map(preset).collect()
}
