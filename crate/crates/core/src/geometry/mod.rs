//! Cameras, transforms, geometry containers and the three projections
//! (back-projection, perspective, orthographic) the rest of the crate uses.

mod camera;
mod cloud;
mod grid;
mod ortho;
mod projection;
mod transform;

pub use camera::Camera;
pub use cloud::{Aabb, PointCloud, Rgb, TriangleMesh};
pub use grid::{BinaryMask, DepthMap, ImageRgb, MaskSemantics};
pub use ortho::{make_ortho_matrix, ortho_project, OrthoMatrix};
pub use projection::{
    apply_transform, back_project, perspective_project, ProjectedPoint, Projection,
};
pub use transform::{rotation_deviation, RigidTransform};

pub(crate) use cloud::centroid;
pub(crate) use grid::check_dims;
pub(crate) use projection::scale_points;
