use serde::{Deserialize, Serialize};

use scaling_lab::experiments::NSummary;
use scaling_lab::report::{ARTIFACT_VERSION, SCHEMA_VERSION};
use scaling_lab::{ExperimentConfig, ScalingFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Config,
    Random,
}

/// Everything needed to reproduce a run: feeding this file back through
/// `--config` replays the same results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub base_seed: u64,
    pub seed_source: SeedSource,
    pub workers: Option<usize>,
    pub started_at: String,
    pub finished_at: String,
    pub per_n: Vec<NSummary>,
    pub fit: Option<ScalingFit>,
    pub files: Vec<String>,
}

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: &str,
        config: &ExperimentConfig,
        seed_source: SeedSource,
        workers: Option<usize>,
        started_at: String,
        finished_at: String,
        per_n: Vec<NSummary>,
        fit: Option<ScalingFit>,
        files: Vec<String>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            config: config.clone(),
            base_seed: config.base_seed,
            seed_source,
            workers,
            started_at,
            finished_at,
            per_n,
            fit,
            files,
        }
    }
}
