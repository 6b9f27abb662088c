use std::cmp::Ordering;

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Camera, DepthMap, ImageRgb, Rgb};
use crate::par;

const TILE: usize = 16;

/// Isotropic point splats in the camera frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplatSet {
    centers: Vec<Point3<f64>>,
    colors: Vec<Rgb>,
    opacities: Vec<f64>,
    radii: Vec<f64>,
}

impl SplatSet {
    pub fn new(
        centers: Vec<Point3<f64>>,
        colors: Vec<Rgb>,
        opacities: Vec<f64>,
        radii: Vec<f64>,
    ) -> Result<Self> {
        let n = centers.len();
        if colors.len() != n || opacities.len() != n || radii.len() != n {
            return Err(Error::InvalidSplats(format!(
                "length mismatch: {n} centers, {} colors, {} opacities, {} radii",
                colors.len(),
                opacities.len(),
                radii.len()
            )));
        }
        if let Some(i) = centers
            .iter()
            .position(|c| !c.coords.iter().all(|x| x.is_finite()))
        {
            return Err(Error::InvalidSplats(format!("center {i} is not finite")));
        }
        if let Some(i) = colors
            .iter()
            .position(|c| !c.iter().all(|x| (0.0..=1.0).contains(x)))
        {
            return Err(Error::InvalidSplats(format!("color {i} outside [0,1]")));
        }
        if let Some(i) = opacities.iter().position(|&o| !(o > 0.0 && o <= 1.0)) {
            return Err(Error::InvalidSplats(format!("opacity {i} outside (0,1]")));
        }
        if let Some(i) = radii.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidSplats(format!("radius {i} is not positive")));
        }
        Ok(Self {
            centers,
            colors,
            opacities,
            radii,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Point3<f64>] {
        &self.centers
    }
    pub fn colors(&self) -> &[Rgb] {
        &self.colors
    }
    pub fn opacities(&self) -> &[f64] {
        &self.opacities
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RasterConfig {
    /// Disc radius in pixels for point silhouettes.
    pub splat_px: f64,
    /// Footprint truncation, in multiples of the projected radius.
    pub gaussian_cutoff: f64,
    /// Compositing stops once transmittance drops below this.
    pub alpha_epsilon: f64,
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self {
            splat_px: 1.0,
            gaussian_cutoff: 3.0,
            alpha_epsilon: 1e-4,
        }
    }
}

impl RasterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.splat_px >= 1.0 && self.splat_px.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "splat_px must be >= 1, got {}",
                self.splat_px
            )));
        }
        if !(self.gaussian_cutoff > 0.0 && self.gaussian_cutoff.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gaussian_cutoff must be positive, got {}",
                self.gaussian_cutoff
            )));
        }
        if !(self.alpha_epsilon > 0.0 && self.alpha_epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha_epsilon must lie in (0,1), got {}",
                self.alpha_epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub color: ImageRgb,
    pub depth: DepthMap,
    /// Accumulated opacity, `sum_i alpha_i T_i`.
    pub alpha: Vec<f64>,
}

impl RenderOutput {
    fn blank(cam: &Camera) -> Self {
        let n = cam.pixel_count();
        Self {
            color: ImageRgb::from_raw(cam.width(), cam.height(), vec![[0.0; 3]; n]),
            depth: DepthMap::from_raw(cam.width(), cam.height(), vec![0.0; n]),
            alpha: vec![0.0; n],
        }
    }
}

/// A splat after projection: everything a pixel needs to evaluate its weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScreenSplat {
    pub u: f64,
    pub v: f64,
    pub z: f64,
    /// Projected radius along u and v, in pixels.
    pub su: f64,
    pub sv: f64,
    pub color: Rgb,
    pub opacity: f64,
    radius: f64,
}

impl ScreenSplat {
    /// Squared footprint distance in units of the projected radius.
    #[inline]
    pub fn normalized_dist2(&self, x: f64, y: f64) -> f64 {
        let du = (x - self.u) / self.su;
        let dv = (y - self.v) / self.sv;
        du * du + dv * dv
    }

    /// Total order: depth first, then the splat's own content, so sorting is
    /// independent of input order.
    pub fn depth_order(&self, other: &Self) -> Ordering {
        self.z
            .total_cmp(&other.z)
            .then(self.u.total_cmp(&other.u))
            .then(self.v.total_cmp(&other.v))
            .then(self.radius.total_cmp(&other.radius))
            .then(self.opacity.total_cmp(&other.opacity))
            .then(self.color[0].total_cmp(&other.color[0]))
            .then(self.color[1].total_cmp(&other.color[1]))
            .then(self.color[2].total_cmp(&other.color[2]))
    }
}

/// Projects splats in front of the camera and sorts them front to back.
pub(crate) fn project_splats(splats: &SplatSet, cam: &Camera) -> Vec<ScreenSplat> {
    let mut out: Vec<ScreenSplat> = (0..splats.len())
        .filter_map(|i| {
            let c = splats.centers[i];
            let (u, v) = cam.project(&c)?;
            let r = splats.radii[i];
            Some(ScreenSplat {
                u,
                v,
                z: c.z,
                su: cam.fx() * r / c.z,
                sv: cam.fy() * r / c.z,
                color: splats.colors[i],
                opacity: splats.opacities[i],
                radius: r,
            })
        })
        .filter(|s| s.su > 0.0 && s.sv > 0.0 && s.su.is_finite() && s.sv.is_finite())
        .collect();
    out.sort_by(ScreenSplat::depth_order);
    out
}

/// Front-to-back alpha compositing of color and depth.
///
/// Per pixel, `alpha_i = opacity_i * exp(-q/2)` where `q` is the squared
/// distance to the projected center in units of the projected radius;
/// contributions with `q > cutoff^2` are skipped. Color and depth accumulate
/// `c_i alpha_i T_i` and `z_i alpha_i T_i` with `T_i = prod_{j<i} (1 - alpha_j)`.
pub fn render(splats: &SplatSet, cam: &Camera, cfg: &RasterConfig) -> Result<RenderOutput> {
    cfg.validate()?;
    let mut out = RenderOutput::blank(cam);
    if splats.is_empty() {
        return Ok(out);
    }
    let screen = project_splats(splats, cam);
    let (w, h) = (cam.width(), cam.height());
    let tiles_x = w.div_ceil(TILE);
    let tiles_y = h.div_ceil(TILE);
    let cutoff = cfg.gaussian_cutoff;

    // Bin splats into tiles; pushing in sorted order keeps each bin sorted.
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); tiles_x * tiles_y];
    for (k, s) in screen.iter().enumerate() {
        let Some((x0, x1)) = pixel_span(s.u, cutoff * s.su, w) else {
            continue;
        };
        let Some((y0, y1)) = pixel_span(s.v, cutoff * s.sv, h) else {
            continue;
        };
        for ty in y0 / TILE..=y1 / TILE {
            for tx in x0 / TILE..=x1 / TILE {
                bins[ty * tiles_x + tx].push(k as u32);
            }
        }
    }

    let cutoff2 = cutoff * cutoff;
    let eps = cfg.alpha_epsilon;
    let tiles = par::map_range(bins.len(), |t| {
        let (tx, ty) = (t % tiles_x, t / tiles_x);
        let xs = tx * TILE..((tx + 1) * TILE).min(w);
        let ys = ty * TILE..((ty + 1) * TILE).min(h);
        let mut px = Vec::with_capacity(TILE * TILE);
        for y in ys {
            for x in xs.clone() {
                let mut color = [0.0; 3];
                let mut depth = 0.0;
                let mut acc = 0.0;
                let mut trans = 1.0;
                for &k in &bins[t] {
                    let s = &screen[k as usize];
                    let q = s.normalized_dist2(x as f64, y as f64);
                    if q > cutoff2 {
                        continue;
                    }
                    let a = s.opacity * (-0.5 * q).exp();
                    let wgt = a * trans;
                    for c in 0..3 {
                        color[c] += s.color[c] * wgt;
                    }
                    depth += s.z * wgt;
                    acc += wgt;
                    trans *= 1.0 - a;
                    if trans < eps {
                        break;
                    }
                }
                px.push((x, y, color, depth, acc));
            }
        }
        px
    });

    for (x, y, color, depth, acc) in tiles.into_iter().flatten() {
        let i = y * w + x;
        out.color.pixels_mut()[i] = color.map(|c| c.clamp(0.0, 1.0));
        out.depth.values_mut()[i] = depth;
        out.alpha[i] = acc.clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Integer pixel range covering `[center - half, center + half]`, clipped to `[0, n)`.
pub(crate) fn pixel_span(center: f64, half: f64, n: usize) -> Option<(usize, usize)> {
    let lo = (center - half).ceil().max(0.0);
    let hi = (center + half).floor().min(n as f64 - 1.0);
    (lo <= hi).then_some((lo as usize, hi as usize))
}
