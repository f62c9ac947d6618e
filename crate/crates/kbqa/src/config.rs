//! Pipeline configuration: one TOML file describing inputs, outputs, and
//! every seed and hyperparameter a run depends on.
//!
//! All relative paths are resolved against the config file's own directory,
//! so a config can travel with its data. Input files must exist when a
//! command starts; output directories are created on demand. Seeds are plain
//! config values — nothing is ever seeded from the clock.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::eval::{ApMode, SnippetK};
use crate::live::SearchApiConfig;
use crate::model::Hyperparams;

/// Knowledge-base input files (tab-separated).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbPaths {
    pub facts: PathBuf,
    pub types: PathBuf,
    pub labels: PathBuf,
    pub schemas: PathBuf,
}

/// Where snippets come from: a fixture corpus always, plus an optional live
/// search endpoint that is only consulted under the `--live` flag.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    /// JSON-lines file mapping question text to ranked snippets.
    pub fixture: PathBuf,
    #[serde(default)]
    pub live: Option<SearchApiConfig>,
}

/// Output directories, created on first use.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub models_dir: PathBuf,
    pub templates_dir: PathBuf,
    pub reports_dir: PathBuf,
}

fn default_max_per_question() -> usize {
    50
}

fn default_distance_cap() -> f64 {
    crate::rank::DEFAULT_DISTANCE_CAP
}

/// Per-query pipeline knobs.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSection {
    /// Snippets fetched per question.
    #[serde(default = "default_max_per_question")]
    pub max_per_question: usize,
    /// Snippets kept after filtering: a number as a string (`"10"`) or
    /// `"all"`. Absent means no filtering. Commands with a `--snippets` flag
    /// override this.
    #[serde(default)]
    pub filter_k: Option<SnippetK>,
    /// Distance feature value when a snippet never mentions the subject.
    #[serde(default = "default_distance_cap")]
    pub distance_cap: f64,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            max_per_question: default_max_per_question(),
            filter_k: None,
            distance_cap: default_distance_cap(),
        }
    }
}

fn default_train() -> usize {
    30
}

fn default_test() -> usize {
    10
}

fn default_split_seed() -> u64 {
    7
}

/// How subjects are split into train and test queries.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_train")]
    pub train: usize,
    #[serde(default = "default_test")]
    pub test: usize,
    #[serde(default = "default_split_seed")]
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            train: default_train(),
            test: default_test(),
            seed: default_split_seed(),
        }
    }
}

fn default_filter_seed() -> u64 {
    17
}

fn default_ranker_seed() -> u64 {
    42
}

/// Gradient-descent hyperparameters and the resampling seeds for the two
/// trained models.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    #[serde(default = "crate::model::default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "crate::model::default_epochs")]
    pub epochs: usize,
    #[serde(default = "crate::model::default_l2")]
    pub l2: f64,
    #[serde(default = "default_filter_seed")]
    pub filter_seed: u64,
    #[serde(default = "default_ranker_seed")]
    pub ranker_seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: crate::model::default_learning_rate(),
            epochs: crate::model::default_epochs(),
            l2: crate::model::default_l2(),
            filter_seed: default_filter_seed(),
            ranker_seed: default_ranker_seed(),
        }
    }
}

impl TrainingConfig {
    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            l2: self.l2,
        }
    }
}

fn default_workers() -> usize {
    1
}

/// The whole pipeline configuration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Rayon worker threads. Outputs are identical for any count >= 1.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub ap_mode: ApMode,
    pub kb: KbPaths,
    pub corpus: CorpusConfig,
    pub paths: OutputPaths,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub training: TrainingConfig,
}

impl PipelineConfig {
    /// Parse a TOML config, resolve its relative paths against its parent
    /// directory, and verify the input files exist.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: PipelineConfig =
            toml::from_str(&body).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if config.workers == 0 {
            return Err(Error::Config(format!(
                "{}: workers must be at least 1",
                path.display()
            )));
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        config.check_inputs_exist()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.kb.facts,
            &mut self.kb.types,
            &mut self.kb.labels,
            &mut self.kb.schemas,
            &mut self.corpus.fixture,
            &mut self.paths.models_dir,
            &mut self.paths.templates_dir,
            &mut self.paths.reports_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&p);
            }
        }
    }

    fn check_inputs_exist(&self) -> Result<()> {
        for p in [
            &self.kb.facts,
            &self.kb.types,
            &self.kb.labels,
            &self.kb.schemas,
            &self.corpus.fixture,
        ] {
            if !p.is_file() {
                return Err(Error::Config(format!(
                    "config references missing file {}",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    /// Point the three output directories under one root, leaving inputs
    /// untouched. Used by the `--out-root` flag.
    pub fn reroot_outputs(&mut self, root: &Path) {
        self.paths.models_dir = root.join("models");
        self.paths.templates_dir = root.join("templates");
        self.paths.reports_dir = root.join("reports");
    }

    pub fn filter_model_path(&self, relation: &str) -> PathBuf {
        self.paths
            .models_dir
            .join(format!("{relation}.filter.json"))
    }

    pub fn ranker_model_path(&self, relation: &str) -> PathBuf {
        self.paths
            .models_dir
            .join(format!("{relation}.ranker.json"))
    }

    pub fn template_set_path(&self, relation: &str) -> PathBuf {
        self.paths.templates_dir.join(format!("{relation}.json"))
    }

    pub fn sweep_csv_path(&self, relation: &str) -> PathBuf {
        self.paths
            .templates_dir
            .join(format!("{relation}.curve.csv"))
    }

    pub fn report_path(&self, relation: &str, k: SnippetK, ext: &str) -> PathBuf {
        self.paths
            .reports_dir
            .join(format!("{relation}.k{k}.{ext}"))
    }
}
