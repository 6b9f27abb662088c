use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use splatfuse_core::synth::Difficulty;

/// Compose reconstructed surgical tools into a tissue point cloud and evaluate the result.
///
/// Log verbosity follows the SPLATFUSE_LOG environment variable (e.g. `info`, `debug`).
#[derive(Debug, Parser)]
#[command(name = "splatfuse", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift depth pixels outside the dilated tool mask to a tissue point cloud.
    Backproject(BackprojectArgs),
    /// Solve each tool's scale and position against its mask.
    Opjpo(OpjpoArgs),
    /// Splat a point cloud into color and depth images.
    Render(RenderArgs),
    /// Per-region PSNR, SSIM and IoU report.
    Metrics(MetricsArgs),
    /// Write a synthetic scene with ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BackprojectArgs {
    /// 8-bit RGB PNG.
    #[arg(long)]
    pub image: PathBuf,
    /// 16-bit depth PNG, scaled by the camera's depth_scale.
    #[arg(long)]
    pub depth: PathBuf,
    /// Tool label PNG; nonzero pixels are tool.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Square dilation kernel (odd) applied to the tool mask before excluding it.
    #[arg(long, default_value_t = 47)]
    pub dilate: usize,
}

#[derive(Debug, Args)]
pub struct OpjpoArgs {
    /// Tissue point cloud (PLY).
    #[arg(long)]
    pub tissue: PathBuf,
    /// Tool model, PLY or OBJ. `ID=PATH` binds a model to one label and lists
    /// that id; a bare PATH serves every label without its own model.
    #[arg(long = "tool", required = true, value_name = "[ID=]PATH")]
    pub tools: Vec<String>,
    /// Tool label PNG, one id per tool.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Search settings JSON; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_placement: PathBuf,
    /// Composed PLY with a per-point `label` (0 tissue, tool id otherwise).
    #[arg(long)]
    pub out_scene: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene PLY in the camera frame.
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long)]
    pub out_color: PathBuf,
    #[arg(long)]
    pub out_depth: PathBuf,
    /// Splat radius in pixels; each point gets world radius `px * z / fx`.
    #[arg(long, default_value_t = 1.0)]
    pub splat_radius: f64,
    /// Label PNG of the tool silhouettes, from the scene's `label` property.
    #[arg(long)]
    pub out_mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub rendered: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// Reference tool label PNG; label 0 is tissue.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Rendered tool label PNG, for per-tool IoU against `--mask`.
    #[arg(long)]
    pub rendered_mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = Difficulty::Easy)]
    pub difficulty: Difficulty,
    #[arg(long)]
    pub out_dir: PathBuf,
}
