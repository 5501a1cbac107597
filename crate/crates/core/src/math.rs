//! Small vector helpers shared across modules. World frame is z-up.

use nalgebra::{Matrix3, UnitQuaternion, Vector2, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;
pub type Quat = UnitQuaternion<f64>;

/// Standard gravity magnitude, m/s².
pub const GRAVITY: f64 = 9.81;

#[inline]
pub fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

#[inline]
pub fn xy(v: &Vec3) -> Vec2 {
    Vec2::new(v.x, v.y)
}

/// Rotates the x-y components of `v` by `yaw` about +z; z is untouched.
#[inline]
pub fn rotate_z(v: &Vec3, yaw: f64) -> Vec3 {
    let (s, c) = yaw.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

#[inline]
pub fn rotate_z2(v: &Vec2, yaw: f64) -> Vec2 {
    let (s, c) = yaw.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Rotation matrix for a yaw angle about +z.
#[inline]
pub fn yaw_matrix(yaw: f64) -> Matrix3<f64> {
    let (s, c) = yaw.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// First two columns of a rotation matrix, column-major: the 6-DoF rotation
/// representation.
#[inline]
pub fn rot6_from_matrix(m: &Matrix3<f64>) -> [f64; 6] {
    [
        m[(0, 0)],
        m[(1, 0)],
        m[(2, 0)],
        m[(0, 1)],
        m[(1, 1)],
        m[(2, 1)],
    ]
}

/// Recovers a rotation matrix from the 6-DoF representation by Gram–Schmidt.
/// Returns `None` when either column is degenerate or they are parallel.
pub fn matrix_from_rot6(r: &[f64; 6]) -> Option<Matrix3<f64>> {
    let a = Vec3::new(r[0], r[1], r[2]);
    let b = Vec3::new(r[3], r[4], r[5]);
    let an = a.norm();
    if !(an > 1e-12) || !(b.norm() > 1e-12) {
        return None;
    }
    let c1 = a / an;
    let b_perp = b - c1 * c1.dot(&b);
    let bn = b_perp.norm();
    if !(bn > 1e-12) {
        return None;
    }
    let c2 = b_perp / bn;
    let c3 = c1.cross(&c2);
    Some(Matrix3::from_columns(&[c1, c2, c3]))
}

#[inline]
pub fn rot6_from_yaw(yaw: f64) -> [f64; 6] {
    let (s, c) = yaw.sin_cos();
    [c, s, 0.0, -s, c, 0.0]
}

#[inline]
pub fn rot6_from_quat(q: &Quat) -> [f64; 6] {
    rot6_from_matrix(q.to_rotation_matrix().matrix())
}

#[inline]
pub fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rot6_round_trip() {
        let q = Quat::from_euler_angles(0.3, -0.7, 1.9);
        let m = *q.to_rotation_matrix().matrix();
        let back = matrix_from_rot6(&rot6_from_matrix(&m)).unwrap();
        assert!((back - m).norm() < 1e-12);
        assert!(matrix_from_rot6(&[0.0; 6]).is_none());
    }
}
