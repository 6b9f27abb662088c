use nalgebra::{Matrix4, Point2, Point3, Vector3};

use super::cloud::Aabb;
use crate::error::{Error, Result};

/// Orthographic normalization of a bounding box into the `[-1, 1]^3` cube.
///
/// Stored in column-vector form, `M [x y z 1]^T` with the offset in the last
/// column; the row-vector form is the transpose. `n` and `f` are the box's
/// z-extremes read as near/far plane distances along the viewing axis, so the
/// z row maps `min z -> +1` and `max z -> -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoMatrix {
    scale: Vector3<f64>,
    offset: Vector3<f64>,
    matrix: Matrix4<f64>,
}

impl OrthoMatrix {
    pub fn from_aabb(aabb: &Aabb) -> Result<Self> {
        let degenerate = aabb.degenerate_axes();
        if !degenerate.is_empty() {
            return Err(Error::DegenerateAabb { axes: degenerate });
        }
        let (l, r) = (aabb.min.x, aabb.max.x);
        let (b, t) = (aabb.min.y, aabb.max.y);
        let (n, f) = (aabb.min.z, aabb.max.z);
        let scale = Vector3::new(2.0 / (r - l), 2.0 / (t - b), -2.0 / (f - n));
        let offset = Vector3::new(-(r + l) / (r - l), -(t + b) / (t - b), (f + n) / (f - n));
        let mut matrix = Matrix4::from_diagonal(&scale.push(1.0));
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&offset);
        Ok(Self {
            scale,
            offset,
            matrix,
        })
    }

    /// Diagonal of the scale block.
    pub fn scale(&self) -> &Vector3<f64> {
        &self.scale
    }

    pub fn offset(&self) -> &Vector3<f64> {
        &self.offset
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.scale.component_mul(&p.coords) + self.offset)
    }
}

/// Builds the orthographic normalization for the cloud's bounding box.
pub fn make_ortho_matrix(points: &[Point3<f64>]) -> Result<OrthoMatrix> {
    let aabb = Aabb::from_points(points).ok_or(Error::EmptyCloud)?;
    OrthoMatrix::from_aabb(&aabb)
}

/// Maps points by `M_o` and drops z. No clipping.
pub fn ortho_project(points: &[Point3<f64>], m: &OrthoMatrix) -> Vec<Point2<f64>> {
    points
        .iter()
        .map(|p| {
            let q = m.apply(p);
            Point2::new(q.x, q.y)
        })
        .collect()
}
