//! Camera calibration JSON.

use std::path::Path;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use splatfuse_core::geometry::{Camera, RigidTransform};

use crate::error::{IoError, Result};
use crate::fsutil::{read_bytes, write_atomic};

pub const CAMERA_SCHEMA_VERSION: u32 = 1;

const POSE_TOLERANCE: f64 = 1e-6;

/// One camera document. `pose` is the camera-to-world extrinsic as a
/// row-major 4x4; absent means identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfigFile {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub depth_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<[[f64; 4]; 4]>,
}

fn schema_version() -> u32 {
    CAMERA_SCHEMA_VERSION
}

impl CameraConfigFile {
    pub fn new(camera: &Camera, depth_scale: f64, pose: Option<&RigidTransform>) -> Self {
        let pose = pose.map(|t| {
            let m = t.to_matrix();
            std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
        });
        Self {
            schema_version: CAMERA_SCHEMA_VERSION,
            fx: camera.fx(),
            fy: camera.fy(),
            cx: camera.cx(),
            cy: camera.cy(),
            width: camera.width(),
            height: camera.height(),
            depth_scale,
            pose,
        }
    }

    pub fn camera(&self) -> splatfuse_core::Result<Camera> {
        Camera::new(self.fx, self.fy, self.cx, self.cy, self.width, self.height)
    }

    pub fn pose(&self) -> splatfuse_core::Result<RigidTransform> {
        match &self.pose {
            None => Ok(RigidTransform::identity()),
            Some(rows) => {
                let m = Matrix4::from_fn(|r, c| rows[r][c]);
                RigidTransform::from_matrix(&m, POSE_TOLERANCE)
            }
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.schema_version != CAMERA_SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        if !(self.depth_scale.is_finite() && self.depth_scale > 0.0) {
            return Err(format!(
                "depth_scale must be positive, got {}",
                self.depth_scale
            ));
        }
        self.camera().map_err(|e| e.to_string())?;
        self.pose().map_err(|e| e.to_string())?;
        Ok(())
    }
}

pub fn read_camera(path: &Path) -> Result<CameraConfigFile> {
    let bytes = read_bytes(path)?;
    let cfg: CameraConfigFile = serde_json::from_slice(&bytes).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    cfg.validate().map_err(|m| IoError::unsupported(path, m))?;
    Ok(cfg)
}

pub fn write_camera(path: &Path, cfg: &CameraConfigFile) -> Result<()> {
    cfg.validate().map_err(|m| IoError::unsupported(path, m))?;
    let mut text = serde_json::to_vec_pretty(cfg).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push(b'\n');
    write_atomic(path, &text)
}
