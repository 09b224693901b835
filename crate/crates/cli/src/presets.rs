//! Shipped configurations.

use crate::config::RunConfig;
use crate::error::ConfigError;

const PRESETS: &[(&str, &str)] = &[
    ("ideal-waveguide", include_str!("../presets/ideal-waveguide.json")),
    ("geo2-taper-taylor", include_str!("../presets/geo2-taper-taylor.json")),
    ("ring-mismatched-Q", include_str!("../presets/ring-mismatched-Q.json")),
    ("ring-equal-Q", include_str!("../presets/ring-equal-Q.json")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_json(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
}

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = preset_json(name)
        .ok_or_else(|| ConfigError::new("$", format!("no preset named {name:?}")))?;
    RunConfig::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn every_preset_resolves() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            let src = cfg.resolve_source(Path::new(".")).unwrap();
            cfg.resolve_grid(&src).unwrap();
        }
        assert!(preset("nope").is_err());
    }
}
