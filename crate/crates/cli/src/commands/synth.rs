use serde::{Deserialize, Serialize};
use splatfuse_core::synth::{generate, Difficulty, SYNTH_DEPTH_SCALE};
use splatfuse_io::{
    write_camera, write_depth, write_image, write_label_mask, write_obj, write_pointcloud,
    CameraConfigFile,
};

use super::{write_json, SCHEMA_VERSION};
use crate::args::SynthArgs;
use crate::error::{CliError, Result};

/// Files written into `--out-dir`:
/// `image.png` (RGB frame), `depth.png` (16-bit), `mask.png` (tool labels),
/// `camera.json`, `tissue.ply` (full tissue surface), `tool.obj` (normalized
/// tool model) and `truth.json`.
pub const SYNTH_FILES: [&str; 7] = [
    "image.png",
    "depth.png",
    "mask.png",
    "camera.json",
    "tissue.ply",
    "tool.obj",
    "truth.json",
];

/// Ground truth: the world tool is `true_sigma * model + true_offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub schema_version: u32,
    pub seed: u64,
    pub difficulty: Difficulty,
    pub tool_id: u32,
    pub true_sigma: f64,
    pub true_offset: [f64; 3],
    pub mask_pixels: usize,
}

pub fn synth(args: &SynthArgs) -> Result<SynthTruth> {
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Fs {
        path: dir.clone(),
        source,
    })?;
    let scene = generate(args.seed, args.difficulty);
    let label =
        u8::try_from(scene.tool_id).map_err(|_| CliError::Compute("tool id exceeds 255".into()))?;

    write_image(&dir.join("image.png"), &scene.image)?;
    write_depth(&dir.join("depth.png"), &scene.depth, SYNTH_DEPTH_SCALE)?;
    write_label_mask(
        &dir.join("mask.png"),
        scene.camera.width(),
        scene.camera.height(),
        &[(label, &scene.mask)],
    )?;
    write_camera(
        &dir.join("camera.json"),
        &CameraConfigFile::new(&scene.camera, SYNTH_DEPTH_SCALE, None),
    )?;
    write_pointcloud(&scene.tissue, &dir.join("tissue.ply"), None)?;
    write_obj(&dir.join("tool.obj"), &scene.tool)?;

    let o = scene.true_offset;
    let truth = SynthTruth {
        schema_version: SCHEMA_VERSION,
        seed: scene.seed,
        difficulty: scene.difficulty,
        tool_id: scene.tool_id,
        true_sigma: scene.true_sigma,
        true_offset: [o.x, o.y, o.z],
        mask_pixels: scene.mask.count(),
    };
    write_json(&dir.join("truth.json"), &truth)?;
    log::info!(
        "synth: seed {} {} into {}",
        args.seed,
        args.difficulty,
        dir.display()
    );
    Ok(truth)
}
