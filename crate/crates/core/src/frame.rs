//! Heading-normalized frames.
//!
//! Observations are expressed in a frame centred on the agent's root x-y
//! position and rotated by the negative root yaw, so that policies see the
//! world relative to where they face. Root height is preserved.

use crate::body::BodyState;
use crate::error::{Error, Result};
use crate::math::{matrix_from_rot6, rotate_z, wrap_angle, Vec2, Vec3};

/// A yaw rotation plus x-y translation mapping world coordinates into an
/// agent's heading frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadingFrame {
    pub origin: Vec2,
    pub yaw: f64,
    sin: f64,
    cos: f64,
}

impl HeadingFrame {
    pub fn new(origin: Vec2, yaw: f64) -> Self {
        let (sin, cos) = yaw.sin_cos();
        HeadingFrame {
            origin,
            yaw,
            sin,
            cos,
        }
    }

    /// Frame of `state`'s root.
    pub fn of(state: &BodyState) -> Result<Self> {
        let yaw = yaw_of(state)?;
        let r = state.root_pos();
        Ok(Self::new(Vec2::new(r.x, r.y), yaw))
    }

    /// World point → frame point (z preserved).
    #[inline]
    pub fn point(&self, p: &Vec3) -> Vec3 {
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        Vec3::new(
            self.cos * dx + self.sin * dy,
            -self.sin * dx + self.cos * dy,
            p.z,
        )
    }

    /// World direction → frame direction.
    #[inline]
    pub fn vector(&self, v: &Vec3) -> Vec3 {
        Vec3::new(
            self.cos * v.x + self.sin * v.y,
            -self.sin * v.x + self.cos * v.y,
            v.z,
        )
    }

    #[inline]
    pub fn point2(&self, p: &Vec2) -> Vec2 {
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        Vec2::new(self.cos * dx + self.sin * dy, -self.sin * dx + self.cos * dy)
    }

    #[inline]
    pub fn rot6(&self, r: &[f64; 6]) -> [f64; 6] {
        let a = self.vector(&Vec3::new(r[0], r[1], r[2]));
        let b = self.vector(&Vec3::new(r[3], r[4], r[5]));
        [a.x, a.y, a.z, b.x, b.y, b.z]
    }
}

/// Heading (yaw) of the root joint: the z-axis angle of a ZYX Euler
/// decomposition, in (−π, π].
pub fn yaw_of(state: &BodyState) -> Result<f64> {
    let r = state
        .joint_rot
        .first()
        .ok_or_else(|| Error::InvalidState("body has no joints".into()))?;
    yaw_of_rot6(r)
}

pub fn yaw_of_rot6(r: &[f64; 6]) -> Result<f64> {
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("non-finite root rotation".into()));
    }
    let m = matrix_from_rot6(r)
        .ok_or_else(|| Error::InvalidState("degenerate root rotation".into()))?;
    let (c, s) = (m[(0, 0)], m[(1, 0)]);
    let yaw = if c.hypot(s) > 1e-9 {
        s.atan2(c)
    } else {
        // Pitched straight up or down: read heading from the second column.
        (-m[(0, 1)]).atan2(m[(1, 1)])
    };
    Ok(wrap_angle(yaw))
}

/// Expresses `state` in the frame rotated by −`reference_yaw` about z and
/// translated so the root x-y position is the origin.
pub fn heading_normalize(state: &BodyState, reference_yaw: f64) -> Result<BodyState> {
    let mut out = state.clone();
    heading_normalize_into(state, reference_yaw, &mut out)?;
    Ok(out)
}

/// In-place variant of [`heading_normalize`]; `out` must have matching
/// lengths.
pub fn heading_normalize_into(
    state: &BodyState,
    reference_yaw: f64,
    out: &mut BodyState,
) -> Result<()> {
    if !reference_yaw.is_finite() {
        return Err(Error::InvalidState("non-finite reference yaw".into()));
    }
    if !state.is_finite() {
        return Err(Error::InvalidState("non-finite body state".into()));
    }
    let root = state.root_pos();
    let frame = HeadingFrame::new(Vec2::new(root.x, root.y), reference_yaw);
    for j in 0..state.joint_count() {
        out.joint_pos[j] = frame.point(&state.joint_pos[j]);
        out.lin_vel[j] = frame.vector(&state.lin_vel[j]);
        out.ang_vel[j] = frame.vector(&state.ang_vel[j]);
        out.joint_rot[j] = frame.rot6(&state.joint_rot[j]);
    }
    Ok(())
}

/// Applies a rigid world transform (yaw rotation about the origin, then x-y
/// translation) to every quantity of `state`.
pub fn transform_body(state: &BodyState, yaw: f64, shift: Vec2) -> BodyState {
    let mut out = state.clone();
    for j in 0..state.joint_count() {
        let p = rotate_z(&state.joint_pos[j], yaw);
        out.joint_pos[j] = Vec3::new(p.x + shift.x, p.y + shift.y, p.z);
        out.lin_vel[j] = rotate_z(&state.lin_vel[j], yaw);
        out.ang_vel[j] = rotate_z(&state.ang_vel[j], yaw);
        let r = &state.joint_rot[j];
        let a = rotate_z(&Vec3::new(r[0], r[1], r[2]), yaw);
        let b = rotate_z(&Vec3::new(r[3], r[4], r[5]), yaw);
        out.joint_rot[j] = [a.x, a.y, a.z, b.x, b.y, b.z];
    }
    out
}
