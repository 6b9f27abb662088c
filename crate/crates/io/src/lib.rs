//! Readers and writers for the files a splatfuse pipeline exchanges: PLY
//! point clouds and meshes, OBJ meshes, PNG images/masks/depths and the camera
//! JSON.
//!
//! Depth maps are 16-bit grayscale PNGs; the stored integer times the
//! camera's `depth_scale` gives scene units. Masks are 8-bit grayscale with any
//! nonzero value set. Axes are never flipped: the camera looks down +z with x
//! right and y down.

mod camera;
mod error;
mod fsutil;
mod obj;
mod ply;
mod raster;

use std::path::Path;

use splatfuse_core::geometry::TriangleMesh;

pub use camera::{read_camera, write_camera, CameraConfigFile, CAMERA_SCHEMA_VERSION};
pub use error::{IoError, ParseError, Result};
pub use fsutil::write_atomic;
pub use obj::{parse_obj, read_obj, write_obj};
pub use ply::{
    encode_ply, parse_ply, read_ply, read_pointcloud, write_ply, write_pointcloud, PlyFormat,
    PlyScene,
};
pub use raster::{
    read_depth, read_image, read_label_masks, read_mask, write_depth, write_image,
    write_label_mask, write_mask,
};

/// `.obj`, or `.ply` with a face element.
pub fn read_mesh(path: &Path) -> Result<TriangleMesh> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("obj") => read_obj(path),
        Some("ply") => {
            let scene = read_ply(path)?;
            if scene.faces.is_empty() {
                return Err(IoError::unsupported(
                    path,
                    "PLY has no faces; expected a mesh",
                ));
            }
            scene.into_mesh().map_err(|e| IoError::invalid(path, e))
        }
        _ => Err(IoError::unsupported(path, "expected a .obj or .ply mesh")),
    }
}
