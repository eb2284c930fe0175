//! Defaults shared by the subcommands. Precedence is flag, then the
//! `--config` file, then these values.

use std::path::Path;

use anyhow::{Context, Result};
use scorekeeper::effects::AdjustMethod;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// `lo..hi:points` or a comma-separated list.
    pub lambda_grid: String,
    pub fit_folds: usize,
    pub validate_folds: usize,
    pub validate_lambda: f64,
    pub synth_games: usize,
    pub adjust_method: AdjustMethod,
    /// Worker threads; absent means one per core.
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            lambda_grid: "1e-6..1e2:25".into(),
            fit_folds: 10,
            validate_folds: 10,
            validate_lambda: 1e-4,
            synth_games: 600,
            adjust_method: AdjustMethod::Expectation,
            threads: None,
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| scorekeeper::Error::Io { path: path.to_path_buf(), source: e })?;
        serde_json::from_str(&text)
            .map_err(scorekeeper::Error::from)
            .with_context(|| format!("reading config {}", path.display()))
    }
}
