use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use super::ToolInstance;
use crate::error::{Error, Result};
use crate::geometry::{make_ortho_matrix, ortho_project, Aabb, Camera, PointCloud};

/// Axis-aligned bounding-box area of 2D points.
pub fn bbox_area(points: &[Point2<f64>]) -> Result<f64> {
    let first = points.first().ok_or(Error::EmptyInput("bbox points"))?;
    let (mut lo, mut hi) = (*first, *first);
    for p in &points[1..] {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    Ok((hi.x - lo.x) * (hi.y - lo.y))
}

/// How the mask side of the area ratio is measured.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ScaleMode {
    /// Bounding box of the masked tissue points under the tissue's
    /// orthographic normalization.
    #[default]
    OrthoMaskedTissue,
    /// Bounding box of the 2D mask pixels, lifted to metric size at `depth`
    /// through the intrinsics. Needs a camera.
    ImageMask { depth: f64 },
}

/// Scale factor `sqrt(A_mask / A_tool)` from orthographic footprints.
///
/// `tissue_mask_points` are the tissue points whose pixels fall inside the
/// tool's dilated mask.
pub fn solve_scale(
    tool: &ToolInstance,
    tissue: &PointCloud,
    tissue_mask_points: &PointCloud,
) -> Result<f64> {
    solve_scale_with(
        tool,
        tissue,
        tissue_mask_points,
        ScaleMode::OrthoMaskedTissue,
        None,
    )
}

pub fn solve_scale_with(
    tool: &ToolInstance,
    tissue: &PointCloud,
    tissue_mask_points: &PointCloud,
    mode: ScaleMode,
    cam: Option<&Camera>,
) -> Result<f64> {
    let ortho = make_ortho_matrix(tissue.positions())?;
    let tool_area = bbox_area(&ortho_project(tool.geometry().points(), &ortho))?;
    if !(tool_area > 0.0) {
        return Err(Error::DegenerateTool);
    }
    let mask_area = match mode {
        ScaleMode::OrthoMaskedTissue => {
            if tissue_mask_points.is_empty() {
                return Err(Error::EmptyInput("masked tissue points"));
            }
            bbox_area(&ortho_project(tissue_mask_points.positions(), &ortho))?
        }
        ScaleMode::ImageMask { depth } => {
            let cam = cam.ok_or_else(|| {
                Error::InvalidConfig("image-mask scale mode needs a camera".into())
            })?;
            if !(depth > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "image-mask depth must be positive, got {depth}"
                )));
            }
            let mask = tool.mask();
            if mask.dims() != (cam.width(), cam.height()) {
                return Err(Error::DimensionMismatch {
                    input: "tool mask",
                    expected_width: cam.width(),
                    expected_height: cam.height(),
                    width: mask.width(),
                    height: mask.height(),
                });
            }
            let pts: Vec<_> = mask
                .bits()
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| {
                    cam.unproject((i % mask.width()) as f64, (i / mask.width()) as f64, depth)
                })
                .collect();
            let bb = Aabb::from_points(&pts).ok_or(Error::EmptyMask("tool mask"))?;
            let e = bb.extent();
            // Same orthographic scaling as the tool side.
            e.x * e.y * (ortho.scale().x * ortho.scale().y).abs()
        }
    };
    if !(mask_area > 0.0) {
        return Err(Error::DegenerateMask);
    }
    Ok((mask_area / tool_area).sqrt())
}
