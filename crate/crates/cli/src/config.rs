use std::path::{Path, PathBuf};
use std::time::Duration;

use dcscn_core::data::{PATCH_SIZE, PATCH_STRIDE};
use dcscn_core::model::ModelConfig;
use dcscn_core::training::TrainConfig;
use serde::Deserialize;

use crate::{CliError, CliResult, TrainArgs};

/// Training options accepted from a `key = value` file.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub manifest: Option<PathBuf>,
    pub train_dir: Option<PathBuf>,
    pub validation_dir: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub preset: Option<String>,
    pub scale: Option<usize>,
    pub seed: Option<u64>,
    pub augment: Option<bool>,
    pub deterministic: Option<bool>,
    pub lr: Option<f64>,
    pub lr_floor: Option<f64>,
    pub lr_decay_factor: Option<f64>,
    pub patience: Option<usize>,
    pub batch_size: Option<usize>,
    pub l2: Option<f64>,
    pub dropout_keep: Option<f64>,
    pub patch_size: Option<usize>,
    pub patch_stride: Option<usize>,
    pub max_epochs: Option<usize>,
    pub max_steps: Option<u64>,
    pub time_budget: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Where the training images come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainSource {
    Manifest(PathBuf),
    Directory(PathBuf),
}

/// Fully resolved `train` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub model: ModelConfig,
    pub source: TrainSource,
    pub validation_dir: Option<PathBuf>,
    pub weights: PathBuf,
    pub report: PathBuf,
    pub augment: bool,
    pub deterministic: bool,
    pub patch_size: usize,
    pub patch_stride: usize,
    pub train: TrainConfig,
}

impl RunConfig {
    /// Merges flags over the optional config file over the defaults.
    pub fn resolve(args: &TrainArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let source = match (args.manifest.clone().or(file.manifest), args.train_dir.clone().or(file.train_dir)) {
            (Some(_), Some(_)) => return Err(CliError::usage("give either a manifest or a train directory, not both")),
            (Some(m), None) => TrainSource::Manifest(m),
            (None, Some(d)) => TrainSource::Directory(d),
            (None, None) => return Err(CliError::usage("a --manifest or --train-dir is required")),
        };
        let weights = args
            .weights
            .clone()
            .or(file.weights)
            .ok_or_else(|| CliError::usage("--weights output path is required"))?;
        let report = args.report.clone().or(file.report).unwrap_or_else(|| sidecar(&weights, "log"));
        let preset = args.preset.clone().or(file.preset).unwrap_or_else(|| "dcscn".into());
        let scale = args.scale.or(file.scale).unwrap_or(2);
        if scale < 2 {
            return Err(CliError::usage(format!("scale must be at least 2, got {scale}")));
        }
        let mut model = ModelConfig::preset(&preset, scale).map_err(|e| CliError::usage(e.to_string()))?;

        let d = TrainConfig::default();
        let train = TrainConfig {
            lr_initial: args.lr.or(file.lr).unwrap_or(d.lr_initial),
            lr_floor: args.lr_floor.or(file.lr_floor).unwrap_or(d.lr_floor),
            lr_decay_factor: args.lr_decay_factor.or(file.lr_decay_factor).unwrap_or(d.lr_decay_factor),
            patience_epochs: args.patience.or(file.patience).unwrap_or(d.patience_epochs),
            batch_size: args.batch_size.or(file.batch_size).unwrap_or(d.batch_size),
            l2_coeff: args.l2.or(file.l2).unwrap_or(d.l2_coeff),
            dropout_keep: args.dropout_keep.or(file.dropout_keep).unwrap_or(d.dropout_keep),
            adam: d.adam,
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            max_epochs: args.max_epochs.or(file.max_epochs),
            max_steps: args.max_steps.or(file.max_steps),
            time_budget: match args.time_budget.or(file.time_budget) {
                Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
                Some(s) => return Err(CliError::usage(format!("time budget must be positive, got {s}"))),
                None => None,
            },
        };
        train.validate().map_err(|e| CliError::usage(e.to_string()))?;
        model.dropout_keep = train.dropout_keep;

        let patch_size = args.patch_size.or(file.patch_size).unwrap_or(PATCH_SIZE);
        let patch_stride = args.patch_stride.or(file.patch_stride).unwrap_or(PATCH_STRIDE);
        if patch_size == 0 || patch_stride == 0 {
            return Err(CliError::usage("patch size and stride must be positive"));
        }
        Ok(RunConfig {
            preset,
            model,
            source,
            validation_dir: args.validation_dir.clone().or(file.validation_dir),
            weights,
            report,
            augment: args.augment || file.augment.unwrap_or(false),
            deterministic: args.deterministic || file.deterministic.unwrap_or(false),
            patch_size,
            patch_stride,
            train,
        })
    }
}

/// `path` with `.ext` appended to its full file name.
pub fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(ext);
    path.with_file_name(name)
}
