//! Tool placement against a reconstructed tissue cloud.
//!
//! Scale comes from orthographic footprints: both the tool model and the
//! tissue points under the tool's mask are pushed through the tissue's
//! orthographic normalization, and the scale factor is the square root of the
//! ratio of their bounding-box areas. Translation is then refined by greedy
//! coordinate descent on the silhouette IoU under the pinhole camera.

mod compose;
mod position;
mod scale;

pub use compose::{compose_scene, ComposedScene, Provenance};
pub use position::{
    evaluate_offset, initial_offset, optimize_position, PlacementResult, SearchConfig,
    SilhouetteObjective,
};
pub use scale::{bbox_area, solve_scale, solve_scale_with, ScaleMode};

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::geometry::{BinaryMask, Camera, PointCloud, RigidTransform, TriangleMesh};

/// Tool model as delivered by the single-view reconstruction step.
#[derive(Debug, Clone, PartialEq)]
pub enum ToolGeometry {
    Points(PointCloud),
    Mesh(TriangleMesh),
}

impl ToolGeometry {
    pub fn points(&self) -> &[Point3<f64>] {
        match self {
            ToolGeometry::Points(c) => c.positions(),
            ToolGeometry::Mesh(m) => m.vertices(),
        }
    }

    pub fn faces(&self) -> Option<&[[usize; 3]]> {
        match self {
            ToolGeometry::Points(_) => None,
            ToolGeometry::Mesh(m) => Some(m.faces()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points().is_empty()
    }
}

/// One segmented tool: its model plus its mask in the evaluated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolInstance {
    id: u32,
    geometry: ToolGeometry,
    mask: BinaryMask,
}

impl ToolInstance {
    pub fn new(id: u32, geometry: ToolGeometry, mask: BinaryMask) -> Result<Self> {
        if geometry.is_empty() {
            return Err(Error::EmptyInput("tool geometry"));
        }
        if mask.is_empty() {
            return Err(Error::EmptyMask("tool mask"));
        }
        Ok(Self { id, geometry, mask })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn geometry(&self) -> &ToolGeometry {
        &self.geometry
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }
}

/// Points of `cloud` whose projection rounds to a set pixel of `mask`: the 3D
/// footprint of a 2D mask on the tissue.
pub fn points_under_mask(
    cloud: &PointCloud,
    cam: &Camera,
    world_to_camera: &RigidTransform,
    mask: &BinaryMask,
) -> Result<PointCloud> {
    crate::geometry::check_dims("mask", mask.dims(), (cam.width(), cam.height()))?;
    let proj = crate::geometry::perspective_project(cloud.positions(), cam, world_to_camera);
    let keep: Vec<usize> = proj
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let p = p.as_ref()?;
            let (x, y) = (p.u.round(), p.v.round());
            let inside =
                x >= 0.0 && y >= 0.0 && (x as usize) < cam.width() && (y as usize) < cam.height();
            (inside && mask.get(x as usize, y as usize)).then_some(i)
        })
        .collect();
    Ok(cloud.select(&keep))
}

/// Median z of the cloud (mean of the two middle values for even counts).
pub fn median_depth(cloud: &PointCloud) -> Option<f64> {
    let mut z: Vec<f64> = cloud.positions().iter().map(|p| p.z).collect();
    if z.is_empty() {
        return None;
    }
    z.sort_by(f64::total_cmp);
    let n = z.len();
    Some(if n % 2 == 1 {
        z[n / 2]
    } else {
        0.5 * (z[n / 2 - 1] + z[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MaskSemantics;

    #[test]
    fn tool_instance_invariants() {
        let mask = BinaryMask::empty(2, 2, MaskSemantics::Tool);
        let pts = PointCloud::from_positions(vec![Point3::origin()]).unwrap();
        assert!(ToolInstance::new(1, ToolGeometry::Points(pts.clone()), mask).is_err());
        let mask = BinaryMask::full(2, 2, MaskSemantics::Tool);
        assert!(
            ToolInstance::new(1, ToolGeometry::Points(PointCloud::empty()), mask.clone()).is_err()
        );
        assert!(ToolInstance::new(1, ToolGeometry::Points(pts), mask).is_ok());
    }

    #[test]
    fn mask_footprint_and_median() {
        let cam = Camera::new(1.0, 1.0, 0.0, 0.0, 3, 1).unwrap();
        let cloud = PointCloud::from_positions(vec![
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(2.0, 0.0, 2.0),
            Point3::new(4.0, 0.0, 2.0),
            Point3::new(0.0, 0.0, -1.0),
        ])
        .unwrap();
        let mask = BinaryMask::from_values(3, 1, &[1, 1, 0], MaskSemantics::Tool).unwrap();
        let under = points_under_mask(&cloud, &cam, &RigidTransform::identity(), &mask).unwrap();
        assert_eq!(under.len(), 2);
        assert_eq!(median_depth(&under), Some(1.5));
        assert_eq!(median_depth(&PointCloud::empty()), None);
    }
}
