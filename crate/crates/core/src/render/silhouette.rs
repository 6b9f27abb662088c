use crate::geometry::{BinaryMask, Camera, MaskSemantics, ProjectedPoint, Projection};

use super::splat::{pixel_span, RasterConfig};

/// Signed doubled area of `(a, b, p)`; positive when `p` is left of `a -> b`.
#[inline]
fn edge(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Binary footprint of projected geometry.
///
/// With `faces`, every non-degenerate triangle whose three vertices are in
/// front of the camera is filled regardless of winding; a pixel center on an
/// edge counts as inside. Without faces each visible point stamps a disc of
/// radius `cfg.splat_px`.
pub fn rasterize_silhouette(
    projection: &Projection,
    cam: &Camera,
    cfg: &RasterConfig,
    faces: Option<&[[usize; 3]]>,
) -> BinaryMask {
    let mut mask = BinaryMask::empty(cam.width(), cam.height(), MaskSemantics::Tool);
    match faces {
        Some(faces) => {
            for f in faces {
                let tri = (
                    projection.points.get(f[0]).copied().flatten(),
                    projection.points.get(f[1]).copied().flatten(),
                    projection.points.get(f[2]).copied().flatten(),
                );
                if let (Some(a), Some(b), Some(c)) = tri {
                    fill_triangle(&mut mask, a, b, c);
                }
            }
        }
        None => {
            for p in projection.visible() {
                stamp_disc(&mut mask, p.u, p.v, cfg.splat_px);
            }
        }
    }
    mask
}

pub(crate) fn stamp_disc(mask: &mut BinaryMask, u: f64, v: f64, radius: f64) {
    let (w, h) = mask.dims();
    let Some((x0, x1)) = pixel_span(u, radius, w) else {
        return;
    };
    let Some((y0, y1)) = pixel_span(v, radius, h) else {
        return;
    };
    let r2 = radius * radius;
    for y in y0..=y1 {
        let dy = y as f64 - v;
        for x in x0..=x1 {
            let dx = x as f64 - u;
            if dx * dx + dy * dy <= r2 {
                mask.set(x, y, true);
            }
        }
    }
}

/// Scanline fill: each row's candidate span comes from the edge crossings,
/// padded by a pixel and then confirmed with the exact half-plane tests.
fn fill_triangle(mask: &mut BinaryMask, a: ProjectedPoint, b: ProjectedPoint, c: ProjectedPoint) {
    let (w, h) = mask.dims();
    let pa = (a.u, a.v);
    let pb = (b.u, b.v);
    let pc = (c.u, c.v);
    let area = edge(pa, pb, pc);
    if area == 0.0 || !area.is_finite() {
        return;
    }
    let vmin = pa.1.min(pb.1).min(pc.1);
    let vmax = pa.1.max(pb.1).max(pc.1);
    let umin = pa.0.min(pb.0).min(pc.0);
    let umax = pa.0.max(pb.0).max(pc.0);
    let Some((y0, y1)) = pixel_span((vmin + vmax) / 2.0, (vmax - vmin) / 2.0, h) else {
        return;
    };
    let Some((bx0, bx1)) = pixel_span((umin + umax) / 2.0, (umax - umin) / 2.0, w) else {
        return;
    };
    let edges = [(pa, pb), (pb, pc), (pc, pa)];
    for y in y0..=y1 {
        let yf = y as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(p, q) in &edges {
            if (p.1 <= yf && yf <= q.1) || (q.1 <= yf && yf <= p.1) {
                if p.1 == q.1 {
                    lo = lo.min(p.0.min(q.0));
                    hi = hi.max(p.0.max(q.0));
                } else {
                    let x = p.0 + (yf - p.1) * (q.0 - p.0) / (q.1 - p.1);
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
        }
        if lo > hi {
            continue;
        }
        let x0 = ((lo.floor() - 1.0).max(bx0 as f64)) as usize;
        let x1 = ((hi.ceil() + 1.0).min(bx1 as f64)) as usize;
        for x in x0..=x1 {
            let p = (x as f64, yf);
            let e0 = edge(pa, pb, p);
            let e1 = edge(pb, pc, p);
            let e2 = edge(pc, pa, p);
            let inside = if area > 0.0 {
                e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0
            } else {
                e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0
            };
            if inside {
                mask.set(x, y, true);
            }
        }
    }
}
