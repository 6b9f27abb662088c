mod backproject;
mod metrics;
mod opjpo;
mod render;
mod synth;

use std::path::Path;

use nalgebra::Point3;
use serde::Serialize;
use splatfuse_core::geometry::{BinaryMask, Camera, PointCloud, RigidTransform};
use splatfuse_core::Error as CoreError;
use splatfuse_io::{read_camera, write_atomic, CameraConfigFile};

pub use backproject::{backproject, BackprojectSummary};
pub use metrics::{metrics, MetricsReport};
pub use opjpo::{opjpo, OpjpoConfig, PlacementReport, ToolEntry, ToolOutcome};
pub use render::{render, RenderSummary};
pub use synth::{synth, SynthTruth, SYNTH_FILES};

use crate::error::{CliError, Result};

/// Version written into every JSON document the CLI produces.
pub const SCHEMA_VERSION: u32 = 1;

pub(crate) struct LoadedCamera {
    pub file: CameraConfigFile,
    pub camera: Camera,
    pub camera_to_world: RigidTransform,
}

pub(crate) fn load_camera(path: &Path) -> Result<LoadedCamera> {
    let file = read_camera(path)?;
    // read_camera has validated both already.
    let camera = file.camera()?;
    let camera_to_world = file.pose()?;
    Ok(LoadedCamera {
        file,
        camera,
        camera_to_world,
    })
}

pub(crate) fn transform_cloud(cloud: PointCloud, t: &RigidTransform) -> Result<PointCloud> {
    if t.is_identity() {
        return Ok(cloud);
    }
    let (pts, colors) = cloud.into_parts();
    let pts: Vec<Point3<f64>> = pts.iter().map(|p| t.apply(p)).collect();
    Ok(PointCloud::new(pts, colors)?)
}

pub(crate) fn check_mask_dims(mask: &BinaryMask, cam: &Camera, input: &'static str) -> Result<()> {
    if mask.dims() != (cam.width(), cam.height()) {
        return Err(CoreError::DimensionMismatch {
            input,
            expected_width: cam.width(),
            expected_height: cam.height(),
            width: mask.width(),
            height: mask.height(),
        }
        .into());
    }
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
    text.push(b'\n');
    Ok(write_atomic(path, &text)?)
}

pub(crate) fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("summary serializes")
    );
}
