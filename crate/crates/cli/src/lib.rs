//! `rinr` command-line surface: encode, decode, evaluate and plan.
//!
//! Commands write their CSV output to a caller-supplied writer so they can be
//! driven from tests as well as from `main`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rinr_core::codec::{BoundingBox, ObjectMode};
use rinr_core::comm::{Alpha, DEFAULT_BANDWIDTH_BYTES_PER_S};
use rinr_core::inr::MlpArchitecture;
use rinr_core::sched::RemainderPolicy;
use thiserror::Error;

mod commands;
pub mod io;
pub mod text;

pub use commands::{cmd_decode, cmd_encode, cmd_eval, cmd_group_sim, cmd_plan, cmd_stats};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unparsable input text; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Everything else that goes wrong at run time; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rinr", version, about = "Region-aware neural image codec")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit background and object networks to an image and write a .rinr file.
    Encode(EncodeArgs),
    /// Reconstruct images from .rinr files, singly or as a grouped batch.
    Decode(DecodeArgs),
    /// PSNR of a decoded image: full frame, object box and background.
    Eval(EvalArgs),
    /// Entropy of raw object values versus residuals against a background decode.
    Stats(StatsArgs),
    /// Serverless versus fog transfer volumes for a device list.
    Plan(PlanArgs),
    /// Grouped versus ungrouped batch latency for a job manifest.
    GroupSim(GroupSimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Merge,
    Isolate,
}

impl From<Policy> for RemainderPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Merge => RemainderPolicy::Merge,
            Policy::Isolate => RemainderPolicy::Isolate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Ppm => "ppm",
            ImageFormat::Png => "png",
        }
    }
}

fn bbox_arg(s: &str) -> Result<BoundingBox, String> {
    text::parse_bbox(s)
}

fn bits_arg(s: &str) -> Result<u8, String> {
    match s {
        "8" => Ok(8),
        "16" => Ok(16),
        _ => Err(format!("bit width must be 8 or 16, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// PNG or binary PPM (P6) image.
    #[arg(long)]
    pub input: PathBuf,
    /// Object box as x,y,w,h in pixels.
    #[arg(long, value_parser = bbox_arg)]
    pub bbox: BoundingBox,
    /// Background network, LxH.
    #[arg(long, default_value = "10x30")]
    pub bg_arch: MlpArchitecture,
    /// Object network, LxH, or `auto` to pick by box area.
    #[arg(long, default_value = "auto")]
    pub obj_arch: String,
    #[arg(long, default_value = "residual")]
    pub mode: ObjectMode,
    /// Seeds the background network; the object network uses seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub bg_steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub obj_steps: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value = "8", value_parser = bits_arg)]
    pub bg_bits: u8,
    #[arg(long, default_value = "16", value_parser = bits_arg)]
    pub obj_bits: u8,
    /// Output .rinr path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-step loss CSV; defaults to the output path with `.fit.csv` appended.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// A single .rinr file.
    #[arg(long, conflicts_with = "batch")]
    pub input: Option<PathBuf>,
    /// Output image for --input; PNG when it ends in .png, PPM otherwise.
    #[arg(long, requires = "input")]
    pub out: Option<PathBuf>,
    /// Text file listing .rinr paths, one per line (relative to the list).
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Directory for batch outputs, named after each input's stem.
    #[arg(long, requires = "batch")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ppm")]
    pub format: ImageFormat,
    #[arg(long, default_value_t = 4)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "merge")]
    pub policy: Policy,
    /// Latency proxy `a + b·parameters`.
    #[arg(long, default_value_t = 0.0)]
    pub latency_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub latency_b: f64,
    /// Decode threads.
    #[arg(long, env = "RINR_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Write only the background network's reconstruction.
    #[arg(long)]
    pub background_only: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub raw: PathBuf,
    #[arg(long)]
    pub decoded: PathBuf,
    #[arg(long, value_parser = bbox_arg)]
    pub bbox: BoundingBox,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub raw: PathBuf,
    /// Background-only reconstruction (`decode --background-only`).
    #[arg(long)]
    pub background: PathBuf,
    #[arg(long, value_parser = bbox_arg)]
    pub bbox: BoundingBox,
    #[arg(long, default_value_t = 256)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Lines of `id payload_bytes receiver_count`.
    #[arg(long)]
    pub devices: PathBuf,
    /// Compressed size over original size, in (0, 1].
    #[arg(long)]
    pub alpha: Alpha,
    /// Size of the detector model as transferred.
    #[arg(long, requires = "data_bytes")]
    pub model_bytes: Option<u64>,
    /// Bytes an edge device must receive to train locally.
    #[arg(long, requires = "model_bytes")]
    pub data_bytes: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_BYTES_PER_S)]
    pub bandwidth: f64,
}

#[derive(Debug, Args)]
pub struct GroupSimArgs {
    /// Lines of `id arch_key [cost]`.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "merge")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0.0)]
    pub latency_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub latency_b: f64,
    /// Random ungrouped orders to sample when the manifest has more than 8 jobs.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Decode(a) => cmd_decode(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
        Command::Plan(a) => cmd_plan(&a, out),
        Command::GroupSim(a) => cmd_group_sim(&a, out),
    }
}
