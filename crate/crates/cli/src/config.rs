use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "N", alias = "truncation")]
    pub truncation: Option<usize>,
    pub radii: Option<usize>,
    pub angles: Option<usize>,
    pub t_list: Option<Vec<f64>>,
    pub weight: Option<String>,
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag values that may override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub radii: Option<usize>,
    pub angles: Option<usize>,
    pub t_list: Vec<f64>,
    pub weight: Option<String>,
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Effective settings of a run after flags are layered over the file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub truncation: usize,
    pub radii: usize,
    pub angles: usize,
    pub t_list: Vec<f64>,
    pub weight: String,
    pub seed: u64,
    pub degree: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_RADII: usize = 96;
pub const DEFAULT_DEGREE: usize = 64;

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self, CliError> {
        let truncation = flags
            .truncation
            .or(file.truncation)
            .unwrap_or(cesaro_core::DEFAULT_TRUNCATION);
        let cfg = Self {
            truncation,
            radii: flags.radii.or(file.radii).unwrap_or(DEFAULT_RADII),
            angles: flags
                .angles
                .or(file.angles)
                .unwrap_or_else(|| (4 * truncation).next_power_of_two().max(1024)),
            t_list: if flags.t_list.is_empty() {
                file.t_list.unwrap_or_default()
            } else {
                flags.t_list
            },
            weight: flags
                .weight
                .or(file.weight)
                .unwrap_or_else(|| "unit".into()),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            degree: flags.degree.or(file.degree).unwrap_or(DEFAULT_DEGREE),
            output: flags.output.or(file.output),
            format: flags.format.or(file.format).unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.truncation < 8 {
            return Err(CliError::validation(format!(
                "N must be at least 8, got {}",
                self.truncation
            )));
        }
        if self.radii < 8 || self.angles < 8 {
            return Err(CliError::validation(format!(
                "grid must be at least 8x8, got {}x{}",
                self.radii, self.angles
            )));
        }
        if let Some(t) = self.t_list.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(CliError::validation(format!("t = {t} is not in [0, 1]")));
        }
        Ok(())
    }

    /// The single `t` of a one-operator command.
    pub fn single_t(&self) -> Result<f64, CliError> {
        match self.t_list.as_slice() {
            [t] => Ok(*t),
            [] => Err(CliError::validation("missing --t")),
            _ => Err(CliError::validation("this command takes exactly one --t")),
        }
    }

    pub fn grid(&self) -> cesaro_core::SupGrid {
        cesaro_core::SupGrid::new(self.radii, self.angles)
    }
}
