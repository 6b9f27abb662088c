//! Grasper proxy: a capped cylindrical shaft with two wedge jaws opening in a V.
use std::f64::consts::TAU;

use nalgebra::Point3;

use crate::geometry::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrasperShape {
    pub shaft_length: f64,
    pub shaft_radius: f64,
    pub jaw_length: f64,
    /// Half-angle between the jaws, radians.
    pub jaw_opening: f64,
    pub segments: usize,
    pub rings: usize,
}

impl Default for GrasperShape {
    fn default() -> Self {
        Self {
            shaft_length: 0.3,
            shaft_radius: 0.018,
            jaw_length: 0.08,
            jaw_opening: 0.3,
            segments: 16,
            rings: 9,
        }
    }
}

/// Builds the grasper along +x, shaft from `x = 0` to `shaft_length`.
pub fn grasper_mesh(shape: &GrasperShape) -> TriangleMesh {
    let n = shape.segments.max(3);
    let rings = shape.rings.max(2);
    let r = shape.shaft_radius;
    let mut v = Vec::new();
    let mut f = Vec::new();

    for k in 0..rings {
        let x = shape.shaft_length * k as f64 / (rings - 1) as f64;
        for s in 0..n {
            let a = TAU * s as f64 / n as f64;
            v.push(Point3::new(x, r * a.cos(), r * a.sin()));
        }
    }
    for k in 0..rings - 1 {
        for s in 0..n {
            let a = k * n + s;
            let b = k * n + (s + 1) % n;
            f.push([a, b, b + n]);
            f.push([a, b + n, a + n]);
        }
    }
    for (ring, x) in [(0, 0.0), (rings - 1, shape.shaft_length)] {
        let c = v.len();
        v.push(Point3::new(x, 0.0, 0.0));
        for s in 0..n {
            f.push([c, ring * n + s, ring * n + (s + 1) % n]);
        }
    }

    for side in [1.0, -1.0] {
        let base_y = side * r * 0.5;
        let half_h = r * 0.5;
        let half_t = r * 0.6;
        let (sa, ca) = (side * shape.jaw_opening).sin_cos();
        let tip = Point3::new(
            shape.shaft_length + shape.jaw_length * ca,
            base_y + shape.jaw_length * sa,
            0.0,
        );
        let x0 = shape.shaft_length;
        let b = v.len();
        v.extend([
            Point3::new(x0, base_y - half_h, -half_t),
            Point3::new(x0, base_y + half_h, -half_t),
            Point3::new(x0, base_y + half_h, half_t),
            Point3::new(x0, base_y - half_h, half_t),
            Point3::new(tip.x, tip.y, -half_t * 0.3),
            Point3::new(tip.x, tip.y, half_t * 0.3),
        ]);
        f.extend([
            [b, b + 1, b + 2],
            [b, b + 2, b + 3],
            [b, b + 1, b + 4],
            [b + 3, b + 2, b + 5],
            [b + 1, b + 2, b + 5],
            [b + 1, b + 5, b + 4],
            [b, b + 3, b + 5],
            [b, b + 5, b + 4],
        ]);
    }
    TriangleMesh::new(v, f).expect("grasper construction produces valid indices")
}
