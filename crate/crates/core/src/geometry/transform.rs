use nalgebra::{Matrix3, Matrix4, Point3, Vector3};

use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-9;

/// Proper rigid motion `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        Self::with_tolerance(rotation, translation, ORTHONORMAL_TOL)
    }

    /// Like [`RigidTransform::new`] but with a caller-chosen orthonormality tolerance
    /// (config files store rotations with limited precision).
    pub fn with_tolerance(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        tol: f64,
    ) -> Result<Self> {
        let deviation = rotation_deviation(&rotation);
        if !(deviation <= tol) || !translation.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidRotation { deviation });
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Splits a homogeneous `[R | t; 0 0 0 1]` matrix.
    pub fn from_matrix(m: &Matrix4<f64>, tol: f64) -> Result<Self> {
        let bottom = [m[(3, 0)], m[(3, 1)], m[(3, 2)], m[(3, 3)]];
        let dev = (bottom[0].abs())
            .max(bottom[1].abs())
            .max(bottom[2].abs())
            .max((bottom[3] - 1.0).abs());
        if !(dev <= tol) {
            return Err(Error::InvalidRotation { deviation: dev });
        }
        let rotation = m.fixed_view::<3, 3>(0, 0).into_owned();
        let translation = m.fixed_view::<3, 1>(0, 3).into_owned();
        Self::with_tolerance(rotation, translation, tol)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == Matrix3::identity() && self.translation == Vector3::zeros()
    }
}

/// max(|RᵀR − I|∞, |det R − 1|).
pub fn rotation_deviation(r: &Matrix3<f64>) -> f64 {
    let ortho = (r.transpose() * r - Matrix3::identity()).abs().max();
    let det = (r.determinant() - 1.0).abs();
    if ortho.is_nan() || det.is_nan() {
        f64::INFINITY
    } else {
        ortho.max(det)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Quaternion, UnitQuaternion};
    use proptest::prelude::*;

    #[test]
    fn rejects_reflection_and_shear() {
        let reflect = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(RigidTransform::new(reflect, Vector3::zeros()).is_err());
        let mut shear = Matrix3::identity();
        shear[(0, 1)] = 1e-6;
        assert!(RigidTransform::new(shear, Vector3::zeros()).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let q = UnitQuaternion::from_euler_angles(0.3, -0.2, 1.1);
        let t = RigidTransform::new(
            *q.to_rotation_matrix().matrix(),
            Vector3::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let p = Point3::new(-0.5, 0.25, 4.0);
        let back = t.inverse().apply(&t.apply(&p));
        assert!((back - p).norm() < 1e-12);
    }

    #[test]
    fn matrix_round_trip() {
        let q = UnitQuaternion::from_euler_angles(0.1, 0.2, 0.3);
        let t = RigidTransform::new(
            *q.to_rotation_matrix().matrix(),
            Vector3::new(4.0, 5.0, 6.0),
        )
        .unwrap();
        let back = RigidTransform::from_matrix(&t.to_matrix(), 1e-9).unwrap();
        assert_eq!(back, t);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn random_rotations_are_accepted(
            w in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
            tx in -10.0f64..10.0,
        ) {
            prop_assume!(w * w + x * x + y * y + z * z > 1e-3);
            let q = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
            let r = *q.to_rotation_matrix().matrix();
            prop_assert!(rotation_deviation(&r) <= 1e-9);
            prop_assert!(RigidTransform::new(r, Vector3::new(tx, 0.0, 0.0)).is_ok());
        }
    }
}
