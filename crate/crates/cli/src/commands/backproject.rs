use serde::{Deserialize, Serialize};
use splatfuse_core::geometry::{back_project, MaskSemantics};
use splatfuse_core::render::dilate_mask;
use splatfuse_io::{read_depth, read_image, read_mask, write_pointcloud};

use super::{check_mask_dims, load_camera, print_json, SCHEMA_VERSION};
use crate::args::BackprojectArgs;
use crate::error::Result;

/// Printed to stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackprojectSummary {
    pub schema_version: u32,
    pub points: usize,
    pub kept_pixels: usize,
}

pub fn backproject(args: &BackprojectArgs) -> Result<BackprojectSummary> {
    let cam = load_camera(&args.camera)?;
    let image = read_image(&args.image)?;
    let depth = read_depth(&args.depth, cam.file.depth_scale)?;
    let tool = read_mask(&args.mask, MaskSemantics::Tool)?;
    check_mask_dims(&tool, &cam.camera, "mask")?;

    let keep = dilate_mask(&tool, args.dilate)?.complement(MaskSemantics::Keep);
    let cloud = back_project(&image, &depth, &keep, &cam.camera, &cam.camera_to_world)?;
    write_pointcloud(&cloud, &args.out, None)?;
    log::info!(
        "backproject: {} points from {} kept pixels",
        cloud.len(),
        keep.count()
    );

    let summary = BackprojectSummary {
        schema_version: SCHEMA_VERSION,
        points: cloud.len(),
        kept_pixels: keep.count(),
    };
    print_json(&summary);
    Ok(summary)
}
