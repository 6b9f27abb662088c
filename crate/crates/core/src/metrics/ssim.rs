use crate::error::{Error, Result};
use crate::geometry::{check_dims, BinaryMask, ImageRgb, Rgb};
use crate::par;

/// Structural-similarity constants. Defaults: 11x11 Gaussian window with
/// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
        }
    }
}

/// BT.601 luma.
fn luma(p: &Rgb) -> f64 {
    0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]
}

fn gaussian_1d(window: usize, sigma: f64) -> Vec<f64> {
    let r = (window / 2) as f64;
    let w: Vec<f64> = (0..window)
        .map(|i| {
            let d = i as f64 - r;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// SSIM on luma, averaged over window centers whose pixel is set in `mask`.
///
/// Windows that overhang the border are truncated and their weights
/// renormalized, so every masked pixel gets a value.
pub fn ssim(a: &ImageRgb, b: &ImageRgb, mask: &BinaryMask) -> Result<f64> {
    ssim_with(a, b, mask, &SsimParams::default())
}

pub fn ssim_with(
    a: &ImageRgb,
    b: &ImageRgb,
    mask: &BinaryMask,
    params: &SsimParams,
) -> Result<f64> {
    check_dims("image", b.dims(), a.dims())?;
    check_dims("mask", mask.dims(), a.dims())?;
    if mask.is_empty() {
        return Err(Error::EmptyMask("ssim region"));
    }
    let (w, h) = a.dims();
    let ya: Vec<f64> = a.pixels().iter().map(luma).collect();
    let yb: Vec<f64> = b.pixels().iter().map(luma).collect();
    let g = gaussian_1d(params.window, params.sigma);
    let r = (params.window / 2) as isize;
    let c1 = (params.k1 * params.dynamic_range).powi(2);
    let c2 = (params.k2 * params.dynamic_range).powi(2);

    let rows = par::map_range(h, |y| {
        let mut sum = 0.0;
        let mut count = 0usize;
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let (mut wsum, mut ma, mut mb, mut saa, mut sbb, mut sab) =
                (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for dy in -r..=r {
                let yy = y as isize + dy;
                if yy < 0 || yy >= h as isize {
                    continue;
                }
                let gy = g[(dy + r) as usize];
                for dx in -r..=r {
                    let xx = x as isize + dx;
                    if xx < 0 || xx >= w as isize {
                        continue;
                    }
                    let wt = gy * g[(dx + r) as usize];
                    let i = yy as usize * w + xx as usize;
                    let (pa, pb) = (ya[i], yb[i]);
                    wsum += wt;
                    ma += wt * pa;
                    mb += wt * pb;
                    saa += wt * pa * pa;
                    sbb += wt * pb * pb;
                    sab += wt * pa * pb;
                }
            }
            let (ma, mb) = (ma / wsum, mb / wsum);
            let var_a = saa / wsum - ma * ma;
            let var_b = sbb / wsum - mb * mb;
            let cov = sab / wsum - ma * mb;
            let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
            let den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
            sum += num / den;
            count += 1;
        }
        (sum, count)
    });
    let (sum, count) = rows
        .into_iter()
        .fold((0.0, 0usize), |(s, n), (rs, rn)| (s + rs, n + rn));
    Ok((sum / count as f64).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MaskSemantics;

    fn textured(w: usize, h: usize) -> ImageRgb {
        let px = (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                let v = 0.5 + 0.4 * (0.37 * x).sin() * (0.23 * y + 0.5).cos();
                [v, (v * 0.8 + 0.1).min(1.0), 1.0 - v]
            })
            .collect();
        ImageRgb::new(w, h, px).unwrap()
    }

    #[test]
    fn identical_is_one() {
        let img = textured(24, 20);
        let keep = BinaryMask::full(24, 20, MaskSemantics::Keep);
        assert_eq!(ssim(&img, &img, &keep).unwrap(), 1.0);
    }

    #[test]
    fn black_versus_white() {
        let black = ImageRgb::filled(16, 16, [0.0; 3]).unwrap();
        let white = ImageRgb::filled(16, 16, [1.0; 3]).unwrap();
        let keep = BinaryMask::full(16, 16, MaskSemantics::Keep);
        let s = ssim(&black, &white, &keep).unwrap();
        // Constant images: (C1)(C2) / ((1 + C1)(C2)) with luma(white) == 1.
        let c1 = 1e-4;
        let yw: f64 = 0.299 + 0.587 + 0.114;
        assert!((s - c1 / (yw * yw + c1)).abs() < 1e-12);
        assert!(s > 0.0 && s < 1e-3);
    }

    #[test]
    fn noise_lowers_ssim() {
        let base = ImageRgb::filled(16, 16, [0.5; 3]).unwrap();
        let noisy: Vec<Rgb> = (0..256)
            .map(|i| {
                let n = if (i * 7919 + i / 16) % 2 == 0 {
                    0.05
                } else {
                    -0.05
                };
                [0.5 + n; 3]
            })
            .collect();
        let noisy = ImageRgb::new(16, 16, noisy).unwrap();
        let keep = BinaryMask::full(16, 16, MaskSemantics::Keep);
        assert!(ssim(&base, &noisy, &keep).unwrap() < 1.0);
    }

    #[test]
    fn empty_mask_is_an_error() {
        let img = textured(8, 8);
        let none = BinaryMask::empty(8, 8, MaskSemantics::Keep);
        assert!(matches!(ssim(&img, &img, &none), Err(Error::EmptyMask(_))));
    }
}
