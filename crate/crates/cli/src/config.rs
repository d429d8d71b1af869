//! Optional JSON config file; any field present overrides the matching
//! command-line flag.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub theta_step: Option<f64>,
    pub l_step: Option<f64>,
    pub m: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub delta_match: Option<f64>,
    pub min_area: Option<usize>,
    pub jobs: Option<usize>,
    pub debug_steps: Option<PathBuf>,
    pub min_diameter_km: Option<f64>,
    pub max_diameter_km: Option<f64>,
    pub dxy: Option<f64>,
    pub dr: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

/// `config value if present, else the flag value`.
pub fn or_flag<T: Copy>(config: Option<T>, flag: T) -> T {
    config.unwrap_or(flag)
}
