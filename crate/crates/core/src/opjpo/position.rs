use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::ToolInstance;
use crate::error::{Error, Result};
use crate::geometry::{centroid, scale_points, Camera, ProjectedPoint, Projection};
use crate::par;
use crate::render::{rasterize_silhouette, RasterConfig};

/// Translation search settings. Steps are in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub shrink_factor: f64,
    pub max_iterations: usize,
    /// Initial camera-frame depth of the tool centroid, usually the median
    /// depth of the masked tissue points.
    pub depth_prior: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            min_step: 1e-3,
            shrink_factor: 0.5,
            max_iterations: 200,
            depth_prior: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 < min_step <= initial_step, got {} and {}",
                self.min_step, self.initial_step
            )));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "shrink_factor must lie in (0,1), got {}",
                self.shrink_factor
            )));
        }
        if let Some(d) = self.depth_prior {
            if !d.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "depth_prior must be finite, got {d}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub sigma: f64,
    pub offset: Vector3<f64>,
    pub iou: f64,
    pub initial_iou: f64,
    pub iterations: usize,
    pub candidate_evaluations: usize,
}

/// Silhouette IoU of the scaled tool as a function of its translation.
pub struct SilhouetteObjective<'a> {
    scaled: Vec<Point3<f64>>,
    faces: Option<&'a [[usize; 3]]>,
    target: &'a [bool],
    target_count: usize,
    cam: &'a Camera,
    raster: &'a RasterConfig,
}

impl<'a> SilhouetteObjective<'a> {
    pub fn new(
        tool: &'a ToolInstance,
        sigma: f64,
        cam: &'a Camera,
        raster: &'a RasterConfig,
    ) -> Result<Self> {
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
        raster.validate()?;
        Ok(Self {
            scaled: scale_points(tool.geometry().points(), sigma, &Vector3::zeros())?,
            faces: tool.geometry().faces(),
            target: mask.bits(),
            target_count: mask.count(),
            cam,
            raster,
        })
    }

    /// Centroid of the scaled, untranslated model.
    pub fn centroid(&self) -> Point3<f64> {
        centroid(&self.scaled).expect("tool geometry is non-empty")
    }

    pub fn projection(&self, offset: &Vector3<f64>) -> Projection {
        let points: Vec<Option<ProjectedPoint>> = self
            .scaled
            .iter()
            .map(|p| {
                let q = p + offset;
                self.cam
                    .project(&q)
                    .map(|(u, v)| ProjectedPoint { u, v, z: q.z })
            })
            .collect();
        let behind_camera = points.iter().filter(|p| p.is_none()).count();
        Projection {
            points,
            behind_camera,
        }
    }

    pub fn iou(&self, offset: &Vector3<f64>) -> f64 {
        let proj = self.projection(offset);
        let sil = rasterize_silhouette(&proj, self.cam, self.raster, self.faces);
        let Some((x0, x1, y0, y1)) = footprint(&proj, self.raster.splat_px, self.cam) else {
            return if self.target_count == 0 { 1.0 } else { 0.0 };
        };
        // Silhouette pixels all lie in the footprint, so only it needs counting.
        let w = self.cam.width();
        let (mut inter, mut area) = (0usize, 0usize);
        for y in y0..=y1 {
            let row = y * w;
            for (&s, &t) in sil.bits()[row + x0..=row + x1]
                .iter()
                .zip(&self.target[row + x0..=row + x1])
            {
                inter += (s & t) as usize;
                area += s as usize;
            }
        }
        let union = area + self.target_count - inter;
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Pixel box `(x0, x1, y0, y1)` covering every visible projected point padded
/// by the disc radius, clipped to the image.
fn footprint(proj: &Projection, pad: f64, cam: &Camera) -> Option<(usize, usize, usize, usize)> {
    let (mut umin, mut umax, mut vmin, mut vmax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in proj.visible() {
        umin = umin.min(p.u);
        umax = umax.max(p.u);
        vmin = vmin.min(p.v);
        vmax = vmax.max(p.v);
    }
    let pad = pad + 1.0;
    let x0 = (umin - pad).floor().max(0.0);
    let x1 = (umax + pad).ceil().min(cam.width() as f64 - 1.0);
    let y0 = (vmin - pad).floor().max(0.0);
    let y1 = (vmax + pad).ceil().min(cam.height() as f64 - 1.0);
    (x0 <= x1 && y0 <= y1).then_some((x0 as usize, x1 as usize, y0 as usize, y1 as usize))
}

/// Offset placing the scaled tool's centroid on the ray through the mask
/// centroid, at `depth_prior` (or at the scaled centroid's own depth).
///
/// The vertex centroid rarely projects onto the silhouette's area centroid, so
/// the placement is then shifted parallel to the image plane until the
/// rendered silhouette's centroid sits on the mask centroid.
pub fn initial_offset(
    tool: &ToolInstance,
    sigma: f64,
    cam: &Camera,
    raster: &RasterConfig,
    depth_prior: Option<f64>,
) -> Result<Vector3<f64>> {
    let objective = SilhouetteObjective::new(tool, sigma, cam, raster)?;
    let c = objective.centroid();
    let (mu, mv) = tool
        .mask()
        .centroid()
        .ok_or(Error::EmptyMask("tool mask"))?;
    let depth = depth_prior.unwrap_or(c.z);
    if !(depth > 0.0) {
        return Err(Error::BehindCamera);
    }
    let mut offset = cam.unproject(mu, mv, depth) - c;
    if objective.scaled.iter().all(|p| p.z + offset.z <= 0.0) {
        return Err(Error::BehindCamera);
    }
    for _ in 0..CENTROID_REFINEMENTS {
        let proj = objective.projection(&offset);
        let sil = rasterize_silhouette(&proj, cam, raster, objective.faces);
        let Some((su, sv)) = sil.centroid() else {
            break;
        };
        offset.x += (mu - su) * depth / cam.fx();
        offset.y += (mv - sv) * depth / cam.fy();
    }
    Ok(offset)
}

const CENTROID_REFINEMENTS: usize = 3;

/// Silhouette IoU of the tool scaled by `sigma` and translated by `offset`.
pub fn evaluate_offset(
    tool: &ToolInstance,
    sigma: f64,
    offset: &Vector3<f64>,
    cam: &Camera,
    raster: &RasterConfig,
) -> Result<f64> {
    Ok(SilhouetteObjective::new(tool, sigma, cam, raster)?.iou(offset))
}

/// Greedy per-axis descent on silhouette IoU with geometric step shrinking.
///
/// Each sweep tries `+step` then `-step` along x, y, z, taking a move only if
/// it strictly increases IoU. A sweep without a move shrinks the step (never
/// below `min_step`); a failed sweep at `min_step` ends the search. One sweep
/// counts as one iteration.
pub fn optimize_position(
    tool: &ToolInstance,
    sigma: f64,
    cam: &Camera,
    cfg: &SearchConfig,
    raster: &RasterConfig,
) -> Result<PlacementResult> {
    cfg.validate()?;
    let objective = SilhouetteObjective::new(tool, sigma, cam, raster)?;
    let mut offset = initial_offset(tool, sigma, cam, raster, cfg.depth_prior)?;
    let mut best = objective.iou(&offset);
    let initial_iou = best;
    let mut evaluations = 1;
    let mut iterations = 0;
    let mut step = cfg.initial_step;

    while iterations < cfg.max_iterations && best < 1.0 {
        iterations += 1;
        let mut moved = false;
        for axis in 0..3 {
            let delta = Vector3::ith(axis, step);
            let (plus, minus) = (offset + delta, offset - delta);
            let (iou_plus, iou_minus) =
                par::join(|| objective.iou(&plus), || objective.iou(&minus));
            evaluations += 2;
            if iou_plus > best {
                offset = plus;
                best = iou_plus;
                moved = true;
            } else if iou_minus > best {
                offset = minus;
                best = iou_minus;
                moved = true;
            }
        }
        if !moved {
            if step <= cfg.min_step {
                break;
            }
            step = (step * cfg.shrink_factor).max(cfg.min_step);
        }
    }

    Ok(PlacementResult {
        sigma,
        offset,
        iou: best,
        initial_iou,
        iterations,
        candidate_evaluations: evaluations,
    })
}
