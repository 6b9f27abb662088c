//! Per-frame 2D observations: color images, depth maps and binary masks.
use serde::{Deserialize, Serialize};

use super::cloud::Rgb;
use crate::error::{Error, Result};

fn check_len(what: &'static str, len: usize, width: usize, height: usize) -> Result<()> {
    if len != width * height {
        return Err(Error::InvalidGrid {
            what,
            reason: format!("{len} values for a {width}x{height} grid"),
        });
    }
    Ok(())
}

pub(crate) fn check_dims(
    input: &'static str,
    (w, h): (usize, usize),
    (ew, eh): (usize, usize),
) -> Result<()> {
    if (w, h) != (ew, eh) {
        return Err(Error::DimensionMismatch {
            input,
            expected_width: ew,
            expected_height: eh,
            width: w,
            height: h,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl ImageRgb {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        check_len("image", pixels.len(), width, height)?;
        if let Some(i) = pixels
            .iter()
            .position(|p| !p.iter().all(|c| (0.0..=1.0).contains(c)))
        {
            return Err(Error::InvalidGrid {
                what: "image",
                reason: format!("pixel {i} has a channel outside [0,1]"),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: Rgb) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub(crate) fn from_raw(width: usize, height: usize, pixels: Vec<Rgb>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }
    pub(crate) fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }
}

/// Depth per pixel in scene units; `0` marks an invalid measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_len("depth map", values.len(), width, height)?;
        if let Some(i) = values.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidGrid {
                what: "depth map",
                reason: format!("value {i} is negative or not finite"),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub(crate) fn from_raw(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// What a set bit in a [`BinaryMask`] means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MaskSemantics {
    /// 1 marks a tool pixel.
    Tool,
    /// 1 marks a pixel that participates in the operation.
    #[default]
    Keep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    semantics: MaskSemantics,
}

impl BinaryMask {
    pub fn new(
        width: usize,
        height: usize,
        bits: Vec<bool>,
        semantics: MaskSemantics,
    ) -> Result<Self> {
        check_len("mask", bits.len(), width, height)?;
        Ok(Self {
            width,
            height,
            bits,
            semantics,
        })
    }

    /// From `{0,1}` bytes; any other value is rejected.
    pub fn from_values(
        width: usize,
        height: usize,
        values: &[u8],
        semantics: MaskSemantics,
    ) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(Error::InvalidGrid {
                what: "mask",
                reason: format!("value {} at index {i} is not 0 or 1", values[i]),
            });
        }
        Self::new(
            width,
            height,
            values.iter().map(|&v| v == 1).collect(),
            semantics,
        )
    }

    pub fn empty(width: usize, height: usize, semantics: MaskSemantics) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
            semantics,
        }
    }

    pub fn full(width: usize, height: usize, semantics: MaskSemantics) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
            semantics,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    pub fn semantics(&self) -> MaskSemantics {
        self.semantics
    }
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn with_semantics(mut self, semantics: MaskSemantics) -> Self {
        self.semantics = semantics;
        self
    }

    /// Bitwise complement with the given semantics, e.g. KEEP from a dilated TOOL mask.
    pub fn complement(&self, semantics: MaskSemantics) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
            semantics,
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        check_dims("mask", other.dims(), self.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
            semantics: self.semantics,
        })
    }

    /// Mean `(x, y)` of the set pixels.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for (i, _) in self.bits.iter().enumerate().filter(|(_, &b)| b) {
            sx += (i % self.width) as f64;
            sy += (i / self.width) as f64;
            n += 1;
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }
}
