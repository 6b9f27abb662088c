//! Brute-force reference implementations used to check the fast paths.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, Camera, ImageRgb, MaskSemantics, Projection};
use crate::opjpo::{SilhouetteObjective, ToolInstance};
use crate::par;
use crate::render::{RasterConfig, RenderOutput, SplatSet};

/// Largest lattice the exhaustive oracle accepts.
pub const MAX_LATTICE_CANDIDATES: usize = 21 * 21 * 21;

/// Cubic lattice of `2 * half_steps + 1` offsets per axis around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub center: Vector3<f64>,
    pub spacing: f64,
    pub half_steps: usize,
}

impl LatticeSpec {
    pub fn per_axis(&self) -> usize {
        2 * self.half_steps + 1
    }

    pub fn candidates(&self) -> usize {
        self.per_axis().pow(3)
    }

    /// The `i`-th offset; indices run x-major so increasing index means
    /// lexicographically increasing offset.
    pub fn offset(&self, i: usize) -> Vector3<f64> {
        let n = self.per_axis();
        let k = self.half_steps as f64;
        let (ix, iy, iz) = (i / (n * n), (i / n) % n, i % n);
        self.center + Vector3::new(ix as f64 - k, iy as f64 - k, iz as f64 - k) * self.spacing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub offset: Vector3<f64>,
    pub iou: f64,
    pub candidates: usize,
}

/// Evaluates the silhouette IoU at every lattice offset and returns the best;
/// ties go to the lexicographically smallest offset.
pub fn exhaustive_search_oracle(
    tool: &ToolInstance,
    sigma: f64,
    cam: &Camera,
    raster: &RasterConfig,
    lattice: &LatticeSpec,
) -> Result<OracleResult> {
    let candidates = lattice.candidates();
    if candidates > MAX_LATTICE_CANDIDATES {
        return Err(Error::LatticeTooLarge {
            candidates,
            limit: MAX_LATTICE_CANDIDATES,
        });
    }
    if !(lattice.spacing.is_finite() && lattice.spacing >= 0.0)
        || !lattice.center.iter().all(|c| c.is_finite())
    {
        return Err(Error::InvalidConfig(format!(
            "lattice spacing {} / center must be finite",
            lattice.spacing
        )));
    }
    let objective = SilhouetteObjective::new(tool, sigma, cam, raster)?;
    let scores = par::map_range(candidates, |i| objective.iou(&lattice.offset(i)));
    let (best, iou) =
        scores
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    Ok(OracleResult {
        offset: lattice.offset(best),
        iou,
        candidates,
    })
}

/// Straight per-pixel sum over every splat: no tiles and no early exit.
/// Splats beyond `gaussian_cutoff` radii contribute nothing, as in the renderer.
pub fn naive_render(splats: &SplatSet, cam: &Camera, cfg: &RasterConfig) -> RenderOutput {
    let (w, h) = (cam.width(), cam.height());
    let screen = crate::render::project_splats_for_oracle(splats, cam);
    let mut color = Vec::with_capacity(w * h);
    let mut depth = Vec::with_capacity(w * h);
    let mut alpha = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (mut c, mut d, mut a_sum, mut t) = ([0.0; 3], 0.0, 0.0, 1.0);
            for s in &screen {
                let q = s.normalized_dist2(x as f64, y as f64);
                if q > cfg.gaussian_cutoff * cfg.gaussian_cutoff {
                    continue;
                }
                let a = s.opacity * (-0.5 * q).exp();
                for k in 0..3 {
                    c[k] += s.color[k] * a * t;
                }
                d += s.z * a * t;
                a_sum += a * t;
                t *= 1.0 - a;
            }
            color.push(c.map(|v: f64| v.clamp(0.0, 1.0)));
            depth.push(d);
            alpha.push(a_sum.clamp(0.0, 1.0));
        }
    }
    RenderOutput {
        color: ImageRgb::new(w, h, color).expect("clamped colors"),
        depth: crate::geometry::DepthMap::new(w, h, depth).expect("finite depths"),
        alpha,
    }
}

/// Sets every pixel within the `kernel x kernel` window of a set pixel.
pub fn brute_force_dilate(mask: &BinaryMask, kernel: usize) -> BinaryMask {
    let (w, h) = mask.dims();
    let r = (kernel / 2) as i64;
    let mut out = BinaryMask::empty(w, h, mask.semantics());
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let hit = (-r..=r).any(|dy| {
                (-r..=r).any(|dx| {
                    let (sx, sy) = (x + dx, y + dy);
                    sx >= 0
                        && sy >= 0
                        && sx < w as i64
                        && sy < h as i64
                        && mask.get(sx as usize, sy as usize)
                })
            });
            out.set(x as usize, y as usize, hit);
        }
    }
    out
}

/// Per-pixel point-in-triangle test over every face and pixel center.
pub fn brute_force_silhouette(
    projection: &Projection,
    cam: &Camera,
    faces: &[[usize; 3]],
) -> BinaryMask {
    let mut out = BinaryMask::empty(cam.width(), cam.height(), MaskSemantics::Tool);
    for y in 0..cam.height() {
        for x in 0..cam.width() {
            let p = (x as f64, y as f64);
            let inside = faces.iter().any(|f| {
                let get = |i: usize| projection.points.get(i).copied().flatten();
                let (Some(a), Some(b), Some(c)) = (get(f[0]), get(f[1]), get(f[2])) else {
                    return false;
                };
                let area = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
                if area == 0.0 {
                    return false;
                }
                let e = |ax: f64, ay: f64, bx: f64, by: f64| {
                    ((bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax)) * area.signum()
                };
                e(a.u, a.v, b.u, b.v) >= 0.0
                    && e(b.u, b.v, c.u, c.v) >= 0.0
                    && e(c.u, c.v, a.u, a.v) >= 0.0
            });
            out.set(x, y, inside);
        }
    }
    out
}
