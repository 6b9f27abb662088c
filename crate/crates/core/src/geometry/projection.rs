use nalgebra::{Point3, Vector3};

use super::camera::Camera;
use super::cloud::{PointCloud, Rgb};
use super::grid::{check_dims, BinaryMask, DepthMap, ImageRgb};
use super::transform::RigidTransform;
use crate::error::{Error, Result};
use crate::par;

/// Lifts every kept pixel with a valid depth to a colored 3D point.
///
/// `mask` is a KEEP mask: set pixels participate. For pixel `(u, v)` with
/// depth `d` the camera-frame point is `d * K^-1 [u, v, 1]^T`, which is then
/// mapped by `camera_to_world`.
pub fn back_project(
    image: &ImageRgb,
    depth: &DepthMap,
    mask: &BinaryMask,
    cam: &Camera,
    camera_to_world: &RigidTransform,
) -> Result<PointCloud> {
    let dims = (cam.width(), cam.height());
    check_dims("image", image.dims(), dims)?;
    check_dims("depth", depth.dims(), dims)?;
    check_dims("mask", mask.dims(), dims)?;

    let width = cam.width();
    let rows: Vec<Vec<(Point3<f64>, Rgb)>> = par::map_range(cam.height(), |v| {
        (0..width)
            .filter_map(|u| {
                let d = depth.get(u, v);
                if !mask.get(u, v) || d <= 0.0 {
                    return None;
                }
                let p = cam.unproject(u as f64, v as f64, d);
                Some((camera_to_world.apply(&p), image.get(u, v)))
            })
            .collect()
    });
    let (positions, colors): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    PointCloud::new(positions, Some(colors))
}

/// A point in pixel coordinates with its camera-frame depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub u: f64,
    pub v: f64,
    pub z: f64,
}

/// Per-input projections; `None` entries lie on or behind the camera plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Projection {
    pub points: Vec<Option<ProjectedPoint>>,
    pub behind_camera: usize,
}

impl Projection {
    pub fn visible(&self) -> impl Iterator<Item = &ProjectedPoint> {
        self.points.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Projects world points through `K [R | T]`, with `world_to_camera = [R | T]`.
pub fn perspective_project(
    points: &[Point3<f64>],
    cam: &Camera,
    world_to_camera: &RigidTransform,
) -> Projection {
    let identity = world_to_camera.is_identity();
    let projected = par::map_slice(points, |p| {
        let pc = if identity {
            *p
        } else {
            world_to_camera.apply(p)
        };
        cam.project(&pc)
            .map(|(u, v)| ProjectedPoint { u, v, z: pc.z })
    });
    let behind_camera = projected.iter().filter(|p| p.is_none()).count();
    Projection {
        points: projected,
        behind_camera,
    }
}

/// `p' = scale * p + offset`, colors preserved.
pub fn apply_transform(
    cloud: &PointCloud,
    scale: f64,
    offset: &Vector3<f64>,
) -> Result<PointCloud> {
    let positions = scale_points(cloud.positions(), scale, offset)?;
    PointCloud::new(positions, cloud.colors().map(<[Rgb]>::to_vec))
}

pub(crate) fn scale_points(
    points: &[Point3<f64>],
    scale: f64,
    offset: &Vector3<f64>,
) -> Result<Vec<Point3<f64>>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::NonPositiveScale(scale));
    }
    Ok(points
        .iter()
        .map(|p| Point3::from(p.coords * scale + offset))
        .collect())
}
