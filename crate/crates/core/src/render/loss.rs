//! Masked color and depth losses used to score a render against observations.
//! Both return unnormalized sums; the `mean` helpers divide by the number of
//! contributing pixels.
use crate::error::{Error, Result};
use crate::geometry::{check_dims, BinaryMask, DepthMap, ImageRgb};

/// Depths at or below this are treated as invalid in the inverse-depth term.
pub const EPSILON_DEPTH: f64 = 1e-6;

/// `sum_{x in mask} |C_hat(x) - C(x)|_1` over the three channels.
pub fn color_loss(rendered: &ImageRgb, reference: &ImageRgb, mask: &BinaryMask) -> Result<f64> {
    Ok(color_terms(rendered, reference, mask)?.0)
}

/// [`color_loss`] divided by the number of masked pixels (0 for an empty mask).
pub fn color_loss_mean(
    rendered: &ImageRgb,
    reference: &ImageRgb,
    mask: &BinaryMask,
) -> Result<f64> {
    let (sum, n) = color_terms(rendered, reference, mask)?;
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

fn color_terms(
    rendered: &ImageRgb,
    reference: &ImageRgb,
    mask: &BinaryMask,
) -> Result<(f64, usize)> {
    check_dims("reference", reference.dims(), rendered.dims())?;
    check_dims("mask", mask.dims(), rendered.dims())?;
    let mut sum = 0.0;
    let mut n = 0;
    for ((a, b), &keep) in rendered
        .pixels()
        .iter()
        .zip(reference.pixels())
        .zip(mask.bits())
    {
        if keep {
            sum += (a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs();
            n += 1;
        }
    }
    Ok((sum, n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthLoss {
    /// `sum |1/D_hat - 1/D|` over masked pixels where both depths are valid.
    pub inverse_depth: f64,
    /// `1 - pearson(D_hat, D)` over the same pixels.
    pub correlation: f64,
    pub valid_pixels: usize,
}

impl DepthLoss {
    pub fn total(&self) -> f64 {
        self.inverse_depth + self.correlation
    }

    pub fn inverse_depth_mean(&self) -> f64 {
        self.inverse_depth / self.valid_pixels as f64
    }
}

pub fn depth_loss(
    rendered: &DepthMap,
    reference: &DepthMap,
    mask: &BinaryMask,
) -> Result<DepthLoss> {
    check_dims("reference", reference.dims(), rendered.dims())?;
    check_dims("mask", mask.dims(), rendered.dims())?;
    let pairs: Vec<(f64, f64)> = rendered
        .values()
        .iter()
        .zip(reference.values())
        .zip(mask.bits())
        .filter(|&((&a, &b), &keep)| keep && a > EPSILON_DEPTH && b > EPSILON_DEPTH)
        .map(|((&a, &b), _)| (a, b))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::CorrelationUndefined(format!(
            "{} valid masked pixels, need at least 2",
            pairs.len()
        )));
    }
    let inverse_depth = pairs.iter().map(|(a, b)| (1.0 / a - 1.0 / b).abs()).sum();
    let n = pairs.len() as f64;
    let mean_a = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_b = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        let (da, db) = (a - mean_a, b - mean_b);
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if !(var_a > 0.0 && var_b > 0.0) {
        return Err(Error::CorrelationUndefined(
            "zero variance in masked depths".into(),
        ));
    }
    Ok(DepthLoss {
        inverse_depth,
        correlation: 1.0 - cov / (var_a * var_b).sqrt(),
        valid_pixels: pairs.len(),
    })
}
