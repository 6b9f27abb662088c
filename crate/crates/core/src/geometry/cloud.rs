use nalgebra::{Point3, Vector3};

use crate::error::{Axis, Error, Result};

/// Linear RGB triple with channels in `[0, 1]`.
pub type Rgb = [f64; 3];

fn valid_color(c: &Rgb) -> bool {
    c.iter().all(|v| (0.0..=1.0).contains(v))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    positions: Vec<Point3<f64>>,
    colors: Option<Vec<Rgb>>,
}

impl PointCloud {
    pub fn new(positions: Vec<Point3<f64>>, colors: Option<Vec<Rgb>>) -> Result<Self> {
        if let Some(i) = positions
            .iter()
            .position(|p| !p.coords.iter().all(|c| c.is_finite()))
        {
            return Err(Error::InvalidCloud(format!("point {i} is not finite")));
        }
        if let Some(colors) = &colors {
            if colors.len() != positions.len() {
                return Err(Error::InvalidCloud(format!(
                    "{} colors for {} points",
                    colors.len(),
                    positions.len()
                )));
            }
            if let Some(i) = colors.iter().position(|c| !valid_color(c)) {
                return Err(Error::InvalidCloud(format!("color {i} outside [0,1]")));
            }
        }
        Ok(Self { positions, colors })
    }

    pub fn from_positions(positions: Vec<Point3<f64>>) -> Result<Self> {
        Self::new(positions, None)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point3<f64>] {
        &self.positions
    }

    pub fn colors(&self) -> Option<&[Rgb]> {
        self.colors.as_deref()
    }

    pub fn into_parts(self) -> (Vec<Point3<f64>>, Option<Vec<Rgb>>) {
        (self.positions, self.colors)
    }

    pub fn centroid(&self) -> Option<Point3<f64>> {
        centroid(&self.positions)
    }

    pub fn aabb(&self) -> Option<Aabb> {
        Aabb::from_points(&self.positions)
    }

    /// Subset by index, keeping colors.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            colors: self
                .colors
                .as_ref()
                .map(|c| indices.iter().map(|&i| c[i]).collect()),
        }
    }
}

pub(crate) fn centroid(points: &[Point3<f64>]) -> Option<Point3<f64>> {
    if points.is_empty() {
        return None;
    }
    let sum = points
        .iter()
        .fold(Vector3::zeros(), |acc: Vector3<f64>, p| acc + p.coords);
    Some(Point3::from(sum / points.len() as f64))
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn from_points(points: &[Point3<f64>]) -> Option<Self> {
        let first = points.first()?;
        let mut min = *first;
        let mut max = *first;
        for p in &points[1..] {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Some(Self { min, max })
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn degenerate_axes(&self) -> Vec<Axis> {
        let e = self.extent();
        [Axis::X, Axis::Y, Axis::Z]
            .into_iter()
            .zip(e.iter())
            .filter(|(_, &len)| !(len > 0.0))
            .map(|(a, _)| a)
            .collect()
    }

    pub fn corners(&self) -> [Point3<f64>; 8] {
        let (lo, hi) = (self.min, self.max);
        std::array::from_fn(|i| {
            Point3::new(
                if i & 1 == 0 { lo.x } else { hi.x },
                if i & 2 == 0 { lo.y } else { hi.y },
                if i & 4 == 0 { lo.z } else { hi.z },
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(i) = vertices
            .iter()
            .position(|p| !p.coords.iter().all(|c| c.is_finite()))
        {
            return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
        }
        for (i, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&k| k >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "face {i} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            if f[0] == f[1] && f[1] == f[2] {
                return Err(Error::InvalidMesh(format!("face {i} is degenerate")));
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices as an uncolored cloud.
    pub fn to_cloud(&self) -> PointCloud {
        PointCloud {
            positions: self.vertices.clone(),
            colors: None,
        }
    }
}
