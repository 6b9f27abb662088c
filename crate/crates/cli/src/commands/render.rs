use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use splatfuse_core::geometry::{perspective_project, BinaryMask, Camera, Projection, Rgb};
use splatfuse_core::render::{
    rasterize_silhouette, render as render_splats, RasterConfig, SplatSet,
};
use splatfuse_io::{read_ply, write_depth, write_image, write_label_mask, PlyScene};

use super::{load_camera, print_json, SCHEMA_VERSION};
use crate::args::RenderArgs;
use crate::error::{CliError, Result};

const UNCOLORED: Rgb = [0.5, 0.5, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSummary {
    pub schema_version: u32,
    pub splats: usize,
    pub behind_camera: usize,
    pub tool_ids: Vec<u32>,
}

/// One silhouette per tool label. Tools with faces are filled triangle by
/// triangle; point-only tools stamp discs of the splat radius.
fn tool_masks(
    scene: &PlyScene,
    projection: &Projection,
    cam: &Camera,
    splat_px: f64,
) -> Result<Vec<(u8, BinaryMask)>> {
    let Some(labels) = &scene.labels else {
        return Ok(Vec::new());
    };
    let ids: BTreeSet<i64> = labels.iter().copied().filter(|&l| l > 0).collect();
    let cfg = RasterConfig {
        splat_px,
        ..RasterConfig::default()
    };
    ids.into_iter()
        .map(|id| {
            let code = u8::try_from(id).map_err(|_| {
                CliError::Compute(format!("tool id {id} does not fit an 8-bit label mask"))
            })?;
            let own = Projection {
                points: projection
                    .points
                    .iter()
                    .zip(labels)
                    .map(|(p, &l)| if l == id { *p } else { None })
                    .collect(),
                behind_camera: 0,
            };
            let faces: Vec<[usize; 3]> = scene
                .faces
                .iter()
                .filter(|f| f.iter().all(|&i| labels[i] == id))
                .copied()
                .collect();
            let faces = (!faces.is_empty()).then_some(faces.as_slice());
            Ok((code, rasterize_silhouette(&own, cam, &cfg, faces)))
        })
        .collect()
}

/// Splats every point in front of the camera as an opaque isotropic Gaussian.
pub fn render(args: &RenderArgs) -> Result<RenderSummary> {
    if !(args.splat_radius >= 1.0 && args.splat_radius.is_finite()) {
        return Err(CliError::Usage(format!(
            "--splat-radius must be at least 1 pixel, got {}",
            args.splat_radius
        )));
    }
    let cam = load_camera(&args.camera)?;
    let scene = read_ply(&args.scene)?;
    if let Some(labels) = &scene.labels {
        if labels.len() != scene.cloud.len() {
            return Err(CliError::Compute(
                "label count does not match point count".into(),
            ));
        }
    }
    let world_to_camera = cam.camera_to_world.inverse();
    let projection = perspective_project(scene.cloud.positions(), &cam.camera, &world_to_camera);

    let mut centers = Vec::new();
    let mut colors = Vec::new();
    for (i, p) in scene.cloud.positions().iter().enumerate() {
        let c = world_to_camera.apply(p);
        if c.z > 0.0 {
            centers.push(c);
            colors.push(scene.cloud.colors().map_or(UNCOLORED, |cs| cs[i]));
        }
    }
    let fx = cam.camera.fx();
    let radii: Vec<f64> = centers
        .iter()
        .map(|c| args.splat_radius * c.z / fx)
        .collect();
    let n = centers.len();
    let splats = SplatSet::new(centers, colors, vec![1.0; n], radii)?;
    let out = render_splats(&splats, &cam.camera, &RasterConfig::default())?;
    write_image(&args.out_color, &out.color)?;
    write_depth(&args.out_depth, &out.depth, cam.file.depth_scale)?;

    let masks = tool_masks(&scene, &projection, &cam.camera, args.splat_radius)?;
    if let Some(path) = &args.out_mask {
        let refs: Vec<(u8, &BinaryMask)> = masks.iter().map(|(id, m)| (*id, m)).collect();
        write_label_mask(path, cam.camera.width(), cam.camera.height(), &refs)?;
    }

    let summary = RenderSummary {
        schema_version: SCHEMA_VERSION,
        splats: n,
        behind_camera: projection.behind_camera,
        tool_ids: masks.iter().map(|(id, _)| *id as u32).collect(),
    };
    print_json(&summary);
    Ok(summary)
}
