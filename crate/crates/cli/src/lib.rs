//! Command-line front end: dataset preparation, training, upscaling,
//! evaluation and complexity analysis.

mod analyze;
mod config;
mod evaluate;
mod images;
mod prepare;
mod train;
mod upscale;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use analyze::{cmd_analyze, cmd_inspect};
pub use config::{FileConfig, RunConfig};
pub use evaluate::cmd_evaluate;
pub use images::list_images;
pub use prepare::cmd_prepare;
pub use train::cmd_train;
pub use upscale::{cmd_upscale, upscale_image, Upscaler};

/// Exit status for bad arguments or configuration.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures after arguments were accepted.
pub const EXIT_RUNTIME: i32 = 1;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DCSCN_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<dcscn_core::Error> for CliError {
    fn from(e: dcscn_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dcscn", version, about = "Fast single-image super-resolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Flip-augment the training images of a manifest into a new directory.
    Prepare(PrepareArgs),
    /// Train a model and write its weights.
    Train(TrainArgs),
    /// Upscale one image.
    Upscale(UpscaleArgs),
    /// PSNR/SSIM on one or more test directories, with a bicubic baseline.
    Evaluate(EvaluateArgs),
    /// Per-pixel operation counts of known networks.
    Analyze(AnalyzeArgs),
    /// Parameter count and complexity of a weights file or preset.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Dataset manifest (`role<TAB>path` lines).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory receiving the augmented images and `manifest.tsv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default, Clone)]
pub struct TrainArgs {
    /// Key = value file with training options; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset manifest with train and validation entries.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory of training images (alternative to --manifest).
    #[arg(long)]
    pub train_dir: Option<PathBuf>,
    /// Directory of validation images; overrides manifest validation entries.
    #[arg(long)]
    pub validation_dir: Option<PathBuf>,
    /// Output weights file.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Progress log; defaults to `<weights>.log`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// `dcscn` or `c-dcscn`.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub scale: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flip-augment training images in memory (for unprepared data).
    #[arg(long)]
    pub augment: bool,
    /// Single worker thread; results do not depend on the thread count either way.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub lr_floor: Option<f64>,
    #[arg(long)]
    pub lr_decay_factor: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub dropout_keep: Option<f64>,
    #[arg(long)]
    pub patch_size: Option<usize>,
    #[arg(long)]
    pub patch_stride: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
}

#[derive(Debug, Args)]
pub struct UpscaleArgs {
    /// Weights file; omit together with --bicubic for plain bicubic upscaling.
    #[arg(long, required_unless_present = "bicubic")]
    pub weights: Option<PathBuf>,
    #[arg(long, conflicts_with = "weights")]
    pub bicubic: bool,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Must match the weights; defaults to the weights' scale (2 for bicubic).
    #[arg(long)]
    pub scale: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Weights file; without it only the bicubic baseline is reported.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Test image directory; repeat for several datasets.
    #[arg(long = "dataset", required = true)]
    pub datasets: Vec<PathBuf>,
    #[arg(long)]
    pub scale: Option<usize>,
    /// Also write the table and per-image records here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Network names; all builtins when empty.
    pub names: Vec<String>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long, conflicts_with = "preset")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub scale: usize,
}

/// Sizes the global worker pool from `--deterministic` or `DCSCN_THREADS`.
pub fn configure_threads(deterministic: bool) -> CliResult {
    let threads = if deterministic {
        Some(1)
    } else {
        match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
                CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        }
    };
    if let Some(n) = threads {
        // A pool can only be installed once per process; later calls keep the first.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    let deterministic = matches!(&cli.command, Command::Train(a) if a.deterministic);
    configure_threads(deterministic)?;
    match cli.command {
        Command::Prepare(a) => cmd_prepare(&a, out),
        Command::Train(a) => cmd_train(&a, out).map(|_| ()),
        Command::Upscale(a) => cmd_upscale(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out).map(|_| ()),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
    }
}
