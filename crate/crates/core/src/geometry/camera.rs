use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pinhole intrinsics. Pixel `(u, v)` has its center at integer coordinates,
/// the camera looks down +z with x right and y down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: usize,
    height: usize,
}

impl Camera {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !(fx.is_finite() && fx > 0.0 && fy.is_finite() && fy > 0.0) {
            return Err(Error::InvalidCamera(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera(format!(
                "image size must be at least 1x1, got {width}x{height}"
            )));
        }
        if !(cx >= 0.0 && cx < width as f64 && cy >= 0.0 && cy < height as f64) {
            return Err(Error::InvalidCamera(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }
    pub fn fy(&self) -> f64 {
        self.fy
    }
    pub fn cx(&self) -> f64 {
        self.cx
    }
    pub fn cy(&self) -> f64 {
        self.cy
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// `depth * K^-1 [u, v, 1]^T` in the camera frame.
    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> Point3<f64> {
        Point3::new(
            depth * (u - self.cx) / self.fx,
            depth * (v - self.cy) / self.fy,
            depth,
        )
    }

    /// Pixel coordinates of a camera-frame point; `None` when `z <= 0`.
    pub fn project(&self, p: &Point3<f64>) -> Option<(f64, f64)> {
        if p.z > 0.0 {
            Some((self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
        } else {
            None
        }
    }

    /// Unit-depth ray direction through pixel `(u, v)`.
    pub fn ray(&self, u: f64, v: f64) -> Vector3<f64> {
        self.unproject(u, v, 1.0).coords
    }
}
