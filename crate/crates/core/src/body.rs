//! Kinematic state carried by agents and free objects.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{rot6_from_yaw, Quat, Vec2, Vec3};
use crate::skeleton::SkeletonSpec;

/// One agent's joint kinematics: rotations (6-DoF form), world positions,
/// angular and linear velocities. Index 0 is the root (pelvis).
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub joint_rot: Vec<[f64; 6]>,
    pub joint_pos: Vec<Vec3>,
    pub ang_vel: Vec<Vec3>,
    pub lin_vel: Vec<Vec3>,
}

impl BodyState {
    /// A body at rest with every joint at the origin and identity rotations.
    pub fn zeros(joint_count: usize) -> Self {
        BodyState {
            joint_rot: vec![rot6_from_yaw(0.0); joint_count],
            joint_pos: vec![Vec3::zeros(); joint_count],
            ang_vel: vec![Vec3::zeros(); joint_count],
            lin_vel: vec![Vec3::zeros(); joint_count],
        }
    }

    /// Rest pose of `skeleton` with the pelvis at `root` facing `yaw`.
    pub fn rest_pose(skeleton: &SkeletonSpec, root: Vec3, yaw: f64) -> Self {
        let mut s = Self::zeros(skeleton.joint_count);
        let rot = rot6_from_yaw(yaw);
        for (j, off) in skeleton.rest_offsets.iter().enumerate() {
            let o = crate::math::rotate_z(&Vec3::new(off[0], off[1], off[2]), yaw);
            s.joint_pos[j] = root + o;
            s.joint_rot[j] = rot;
        }
        s
    }

    /// In-place [`BodyState::rest_pose`]; lengths must already match.
    pub fn set_rest_pose(&mut self, skeleton: &SkeletonSpec, root: Vec3, yaw: f64) {
        let rot = rot6_from_yaw(yaw);
        for (j, off) in skeleton.rest_offsets.iter().enumerate() {
            let o = crate::math::rotate_z(&Vec3::new(off[0], off[1], off[2]), yaw);
            self.joint_pos[j] = root + o;
            self.joint_rot[j] = rot;
            self.lin_vel[j] = Vec3::zeros();
            self.ang_vel[j] = Vec3::zeros();
        }
    }

    pub fn joint_count(&self) -> usize {
        self.joint_pos.len()
    }

    pub fn root_pos(&self) -> Vec3 {
        self.joint_pos[0]
    }

    pub fn root_vel(&self) -> Vec3 {
        self.lin_vel[0]
    }

    /// Checks array lengths against the skeleton and that every value is
    /// finite.
    pub fn validate(&self, skeleton: &SkeletonSpec) -> Result<()> {
        let n = skeleton.joint_count;
        if self.joint_rot.len() != n
            || self.joint_pos.len() != n
            || self.ang_vel.len() != n
            || self.lin_vel.len() != n
        {
            return Err(Error::InvalidState(format!(
                "body arrays do not match joint_count {n}"
            )));
        }
        if !self.is_finite() {
            return Err(Error::InvalidState("non-finite body state".into()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.joint_rot.iter().flatten().all(|v| v.is_finite())
            && self
                .joint_pos
                .iter()
                .chain(&self.ang_vel)
                .chain(&self.lin_vel)
                .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Copies `other` into `self` without reallocating when lengths match.
    pub fn copy_from(&mut self, other: &BodyState) {
        self.joint_rot.clone_from(&other.joint_rot);
        self.joint_pos.clone_from(&other.joint_pos);
        self.ang_vel.clone_from(&other.ang_vel);
        self.lin_vel.clone_from(&other.lin_vel);
    }

    /// Number of values in the flattened proprioceptive observation.
    pub fn flat_len(joint_count: usize) -> usize {
        joint_count * 15
    }
}

/// Pose and velocity of a free rigid object (ball, javelin, club head).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectKinematics {
    pub pos: Vec3,
    pub orient: Quat,
    pub lin_vel: Vec3,
    pub ang_vel: Vec3,
}

impl Default for ObjectKinematics {
    fn default() -> Self {
        Self::at(Vec3::zeros())
    }
}

impl ObjectKinematics {
    pub fn at(pos: Vec3) -> Self {
        ObjectKinematics {
            pos,
            orient: Quat::identity(),
            lin_vel: Vec3::zeros(),
            ang_vel: Vec3::zeros(),
        }
    }

    pub fn with_velocity(pos: Vec3, lin_vel: Vec3) -> Self {
        ObjectKinematics {
            lin_vel,
            ..Self::at(pos)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.orient.as_ref();
        if !(self.pos.iter().all(|v| v.is_finite())
            && self.lin_vel.iter().all(|v| v.is_finite())
            && self.ang_vel.iter().all(|v| v.is_finite())
            && q.coords.iter().all(|v| v.is_finite()))
        {
            return Err(Error::InvalidState("non-finite object state".into()));
        }
        if (q.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidState(format!(
                "object quaternion norm {} is not unit",
                q.norm()
            )));
        }
        Ok(())
    }

    /// 13 values: position, quaternion (w, x, y, z), linear and angular
    /// velocity.
    pub fn to_array(&self) -> [f64; 13] {
        let q = self.orient.as_ref();
        [
            self.pos.x,
            self.pos.y,
            self.pos.z,
            q.w,
            q.i,
            q.j,
            q.k,
            self.lin_vel.x,
            self.lin_vel.y,
            self.lin_vel.z,
            self.ang_vel.x,
            self.ang_vel.y,
            self.ang_vel.z,
        ]
    }

    pub fn speed(&self) -> f64 {
        self.lin_vel.norm()
    }
}

/// Axis-aligned playing area in the x-y plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArenaBounds {
    pub min_xy: [f64; 2],
    pub max_xy: [f64; 2],
}

impl ArenaBounds {
    pub fn new(min_xy: [f64; 2], max_xy: [f64; 2]) -> Result<Self> {
        if !(min_xy[0] < max_xy[0] && min_xy[1] < max_xy[1]) {
            return Err(Error::Config(format!(
                "arena bounds {min_xy:?}..{max_xy:?} are empty"
            )));
        }
        Ok(ArenaBounds { min_xy, max_xy })
    }

    /// Bounds centred on the origin.
    pub fn centered(length: f64, width: f64) -> Self {
        ArenaBounds {
            min_xy: [-length / 2.0, -width / 2.0],
            max_xy: [length / 2.0, width / 2.0],
        }
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.min_xy[0] && p.x <= self.max_xy[0] && p.y >= self.min_xy[1] && p.y <= self.max_xy[1]
    }

    /// Distances from `p` to the four edges: +x, −x, +y, −y. Negative when
    /// outside that edge.
    pub fn edge_distances(&self, p: &Vec2) -> [f64; 4] {
        [
            self.max_xy[0] - p.x,
            p.x - self.min_xy[0],
            self.max_xy[1] - p.y,
            p.y - self.min_xy[1],
        ]
    }
}

/// Named geometry pairs whose contact the environments care about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum ContactPair {
    ClubBall = 0,
    RacketBall = 1,
    TipTarget = 2,
    HandBall = 3,
    FootBall = 4,
    BodyBar = 5,
    BodyHurdle = 6,
}

impl ContactPair {
    pub const ALL: [ContactPair; 7] = [
        ContactPair::ClubBall,
        ContactPair::RacketBall,
        ContactPair::TipTarget,
        ContactPair::HandBall,
        ContactPair::FootBall,
        ContactPair::BodyBar,
        ContactPair::BodyHurdle,
    ];

    /// Sticky pairs latch on first contact and clear only at reset (or when
    /// the environment re-arms them).
    pub fn is_sticky(self) -> bool {
        matches!(self, ContactPair::ClubBall | ContactPair::RacketBall)
    }

    pub fn name(self) -> &'static str {
        match self {
            ContactPair::ClubBall => "club_ball",
            ContactPair::RacketBall => "racket_ball",
            ContactPair::TipTarget => "tip_target",
            ContactPair::HandBall => "hand_ball",
            ContactPair::FootBall => "foot_ball",
            ContactPair::BodyBar => "body_bar",
            ContactPair::BodyHurdle => "body_hurdle",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown contact pair `{name}`")))
    }
}

const PAIRS: usize = ContactPair::ALL.len();

/// Per-body contact forces plus named pair flags for one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactSet {
    /// Contact force on each joint's geometry, Newtons.
    pub forces: Vec<Vec3>,
    flags: [bool; PAIRS],
    pair_force: [f64; PAIRS],
}

impl ContactSet {
    pub fn new(joint_count: usize) -> Self {
        ContactSet {
            forces: vec![Vec3::zeros(); joint_count],
            flags: [false; PAIRS],
            pair_force: [0.0; PAIRS],
        }
    }

    pub fn flag(&self, pair: ContactPair) -> bool {
        self.flags[pair as usize]
    }

    /// Largest contact force reported for `pair` since the last step clear.
    pub fn pair_force(&self, pair: ContactPair) -> f64 {
        self.pair_force[pair as usize]
    }

    pub fn record(&mut self, pair: ContactPair, force: f64) {
        let i = pair as usize;
        self.flags[i] = true;
        self.pair_force[i] = self.pair_force[i].max(force);
    }

    /// Clears the sticky flag of `pair`; used when a rally re-arms the
    /// racket gate.
    pub fn rearm(&mut self, pair: ContactPair) {
        self.flags[pair as usize] = false;
    }

    /// Start-of-step clear: forces and non-sticky flags reset, sticky flags
    /// persist.
    pub fn begin_step(&mut self) {
        for f in &mut self.forces {
            *f = Vec3::zeros();
        }
        for p in ContactPair::ALL {
            if !p.is_sticky() {
                self.flags[p as usize] = false;
            }
            self.pair_force[p as usize] = 0.0;
        }
    }

    /// Episode reset: everything clears.
    pub fn reset(&mut self) {
        self.begin_step();
        self.flags = [false; PAIRS];
    }

    /// Squared norm of each body's contact force after scaling by
    /// `1/scale` (one value per joint).
    pub fn per_body_sq_norms(&self, scale: f64) -> impl Iterator<Item = f64> + '_ {
        self.forces.iter().map(move |f| (f / scale).norm_squared())
    }

    pub fn is_finite(&self) -> bool {
        self.forces.iter().all(|f| f.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sticky_flags_survive_step_clear() {
        let mut c = ContactSet::new(24);
        c.record(ContactPair::ClubBall, 10.0);
        c.record(ContactPair::TipTarget, 60.0);
        c.begin_step();
        assert!(c.flag(ContactPair::ClubBall));
        assert!(!c.flag(ContactPair::TipTarget));
        assert_eq!(c.pair_force(ContactPair::TipTarget), 0.0);
        c.reset();
        assert!(!c.flag(ContactPair::ClubBall));
    }

    #[test]
    fn unknown_pair_name_is_config_error() {
        assert!(matches!(
            ContactPair::from_name("sword_moon"),
            Err(Error::Config(_))
        ));
        assert_eq!(
            ContactPair::from_name("racket_ball").unwrap(),
            ContactPair::RacketBall
        );
    }

    #[test]
    fn object_quaternion_must_be_unit() {
        let mut o = ObjectKinematics::at(Vec3::new(0.0, 0.0, 1.0));
        o.validate().unwrap();
        o.orient = Quat::new_unchecked(nalgebra::Quaternion::new(2.0, 0.0, 0.0, 0.0));
        assert!(o.validate().is_err());
    }

    #[test]
    fn arena_bounds_reject_empty() {
        assert!(ArenaBounds::new([0.0, 0.0], [1.0, 0.0]).is_err());
        let b = ArenaBounds::centered(14.0, 2.0);
        assert_eq!(b.edge_distances(&Vec2::new(6.0, 0.5)), [1.0, 13.0, 0.5, 1.5]);
    }
}
