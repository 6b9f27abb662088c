//! Region-wise evaluation: silhouette IoU plus masked PSNR and SSIM.

mod report;
mod ssim;

pub use report::{RegionLabel, RegionReport};
pub use ssim::{ssim, ssim_with, SsimParams};

use crate::error::{Error, Result};
use crate::geometry::{check_dims, BinaryMask, ImageRgb};

/// `|a ∩ b| / |a ∪ b|`, or 1 when both masks are empty.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    check_dims("mask", b.dims(), a.dims())?;
    Ok(iou_bits(a.bits(), b.bits()))
}

pub(crate) fn iou_bits(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        inter += (x & y) as usize;
        union += (x | y) as usize;
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Mean squared error over masked pixels and all three channels.
pub fn masked_mse(a: &ImageRgb, b: &ImageRgb, mask: &BinaryMask) -> Result<f64> {
    check_dims("image", b.dims(), a.dims())?;
    check_dims("mask", mask.dims(), a.dims())?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for ((pa, pb), &keep) in a.pixels().iter().zip(b.pixels()).zip(mask.bits()) {
        if keep {
            for c in 0..3 {
                let d = pa[c] - pb[c];
                sum += d * d;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyMask("psnr region"));
    }
    Ok(sum / (3 * n) as f64)
}

/// Peak signal-to-noise ratio in dB with peak 1; `+inf` for identical regions.
pub fn psnr(a: &ImageRgb, b: &ImageRgb, mask: &BinaryMask) -> Result<f64> {
    let mse = masked_mse(a, b, mask)?;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    })
}
