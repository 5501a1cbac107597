//! Pluggable humanoid dynamics and the built-in reduced proxy.
//!
//! The proxy moves a velocity-controlled root and five PD-tracked markers
//! (head, wrists, feet); every other joint is placed by blending the rest
//! pose with the displacement of the markers it hangs from.

use serde::{Deserialize, Serialize};

use crate::body::BodyState;
use crate::error::{Error, Result};
use crate::frame::yaw_of;
use crate::math::{rot6_from_yaw, rotate_z, Vec3, GRAVITY};
use crate::skeleton::SkeletonSpec;

use super::object::StaticScene;

/// Humanoid dynamics driven by per-agent action vectors.
pub trait DynamicsBackend: Send + std::fmt::Debug {
    fn skeleton(&self) -> &SkeletonSpec;
    fn reset(&mut self, initial: &BodyState) -> Result<()>;
    /// Advances `substeps` steps of `dt`. `action` is already validated to
    /// be finite with length `action_dim`.
    fn step(&mut self, action: &[f32], substeps: usize, dt: f64, scene: &StaticScene) -> Result<()>;
    fn state(&self) -> &BodyState;
    /// Largest actuation magnitude applied during the last `step`.
    fn peak_actuation(&self) -> f64;
    fn torque_cap(&self) -> f64;
    fn clone_box(&self) -> Box<dyn DynamicsBackend>;
}

impl Clone for Box<dyn DynamicsBackend> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Action channels read by the proxy. Channels past the marker block are
/// accepted and ignored.
pub mod channel {
    pub const FORWARD: usize = 0;
    pub const LATERAL: usize = 1;
    pub const YAW_RATE: usize = 2;
    /// Positive: jump strength. Negative: crouch depth.
    pub const JUMP: usize = 3;
    pub const GRIP: usize = 4;
    /// Three channels per marker, in `MARKERS` order, heading frame.
    pub const MARKER_BASE: usize = 6;
    pub const USED: usize = MARKER_BASE + 15;
}

pub const MARKERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProxyConfig {
    /// Cap on every actuation channel (N or N·m).
    pub torque_cap: f64,
    pub stand_height: f64,
    pub max_speed: f64,
    pub max_yaw_rate: f64,
    pub body_mass: f64,
    pub velocity_gain: f64,
    pub yaw_inertia: f64,
    pub yaw_gain: f64,
    /// Effective mass the legs push against for height control and jumps.
    pub leg_mass: f64,
    pub height_gain: f64,
    pub height_damping: f64,
    pub push_distance: f64,
    pub marker_mass: f64,
    pub marker_gain: f64,
    pub marker_damping: f64,
    /// Maximum target displacement per marker: head, wrists, feet.
    pub reach: [f64; 3],
}

impl Default for ProxyConfig {
    fn default() -> Self {
        ProxyConfig {
            torque_cap: 500.0,
            stand_height: 0.95,
            max_speed: 10.0,
            max_yaw_rate: 4.0,
            body_mass: 70.0,
            velocity_gain: 300.0,
            yaw_inertia: 20.0,
            yaw_gain: 200.0,
            leg_mass: 14.0,
            height_gain: 2000.0,
            height_damping: 330.0,
            push_distance: 0.4,
            marker_mass: 1.0,
            marker_gain: 400.0,
            marker_damping: 40.0,
            reach: [0.3, 0.8, 0.6],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProxyHumanoid {
    skeleton: SkeletonSpec,
    config: ProxyConfig,
    root: Vec3,
    root_vel: Vec3,
    yaw: f64,
    yaw_rate: f64,
    airborne: bool,
    markers: [usize; MARKERS],
    disp: [Vec3; MARKERS],
    disp_vel: [Vec3; MARKERS],
    /// Per joint, how strongly each marker displacement moves it.
    weights: Vec<[f64; MARKERS]>,
    /// Joints clamped to stay above the ground (legs).
    grounded_joints: Vec<bool>,
    peak: f64,
    state: BodyState,
}

const FOOT_CLEARANCE: f64 = 0.03;
const CHAIN_DECAY: f64 = 0.6;

impl ProxyHumanoid {
    pub fn new(skeleton: SkeletonSpec, config: ProxyConfig) -> Result<Self> {
        skeleton.validate()?;
        if !(config.torque_cap > 0.0) {
            return Err(Error::Config("torque cap must be positive".into()));
        }
        let ee = skeleton.end_effectors;
        let markers = [
            ee.head,
            ee.left_wrist,
            ee.right_wrist,
            ee.left_foot,
            ee.right_foot,
        ];
        let n = skeleton.joint_count;
        let mut weights = vec![[0.0; MARKERS]; n];
        for (m, &mj) in markers.iter().enumerate() {
            for (j, w) in weights.iter_mut().enumerate() {
                if j == mj || skeleton.is_ancestor(mj, j) {
                    w[m] = 1.0;
                }
            }
            // Up the chain until a branching joint.
            let mut k = 1;
            let mut cur = skeleton.parents[mj];
            while let Some(p) = cur {
                if skeleton.parents[p].is_none() || skeleton.children(p).count() > 1 {
                    break;
                }
                weights[p][m] = CHAIN_DECAY.powi(k);
                k += 1;
                cur = skeleton.parents[p];
            }
        }
        let grounded_joints = skeleton
            .rest_offsets
            .iter()
            .map(|o| o[2] < -0.3)
            .collect();
        let state = BodyState::rest_pose(&skeleton, Vec3::new(0.0, 0.0, config.stand_height), 0.0);
        Ok(ProxyHumanoid {
            skeleton,
            config,
            root: Vec3::new(0.0, 0.0, config.stand_height),
            root_vel: Vec3::zeros(),
            yaw: 0.0,
            yaw_rate: 0.0,
            airborne: false,
            markers,
            disp: [Vec3::zeros(); MARKERS],
            disp_vel: [Vec3::zeros(); MARKERS],
            weights,
            grounded_joints,
            peak: 0.0,
            state,
        })
    }

    pub fn config(&self) -> &ProxyConfig {
        &self.config
    }

    pub fn is_airborne(&self) -> bool {
        self.airborne
    }

    /// Vertical take-off speed for a jump command in `[0, 1]`.
    pub fn takeoff_speed(&self, jump: f64) -> f64 {
        let push = (self.config.torque_cap * jump.clamp(0.0, 1.0)).min(self.config.torque_cap)
            / self.config.leg_mass;
        (2.0 * (push - GRAVITY).max(0.0) * self.config.push_distance).sqrt()
    }

    fn reach(&self, m: usize) -> f64 {
        match m {
            0 => self.config.reach[0],
            1 | 2 => self.config.reach[1],
            _ => self.config.reach[2],
        }
    }

    #[inline]
    fn saturate(&mut self, u: f64) -> f64 {
        let cap = self.config.torque_cap;
        let c = u.clamp(-cap, cap);
        self.peak = self.peak.max(c.abs());
        c
    }

    fn substep(&mut self, a: &[f32], dt: f64, scene: &StaticScene) {
        let cfg = self.config;
        let act = |i: usize| a.get(i).map_or(0.0, |&v| (v as f64).clamp(-1.0, 1.0));
        let ground = scene.ground_height(self.root.x, self.root.y);

        // Yaw.
        let target_rate = act(channel::YAW_RATE) * cfg.max_yaw_rate;
        let tau = self.saturate(cfg.yaw_gain * (target_rate - self.yaw_rate));
        self.yaw_rate += tau / cfg.yaw_inertia * dt;
        self.yaw = crate::math::wrap_angle(self.yaw + self.yaw_rate * dt);

        // Planar velocity, heading frame targets; no traction in the air.
        if !self.airborne {
            let target = rotate_z(
                &Vec3::new(act(channel::FORWARD), act(channel::LATERAL), 0.0),
                self.yaw,
            ) * cfg.max_speed;
            let mut f = (target - Vec3::new(self.root_vel.x, self.root_vel.y, 0.0)) * cfg.velocity_gain;
            let norm = f.norm();
            if norm > cfg.torque_cap {
                f *= cfg.torque_cap / norm;
            }
            self.peak = self.peak.max(f.norm().min(cfg.torque_cap));
            self.root_vel.x += f.x / cfg.body_mass * dt;
            self.root_vel.y += f.y / cfg.body_mass * dt;
        }

        // Height: crouch tracking, jumps, ballistic flight.
        let jump = act(channel::JUMP);
        if self.airborne {
            self.root_vel.z -= GRAVITY * dt;
            self.root.z += self.root_vel.z * dt;
            let land = ground + cfg.stand_height;
            if self.root.z <= land && self.root_vel.z < 0.0 {
                self.root.z = land;
                self.root_vel.z = 0.0;
                self.airborne = false;
            }
        } else {
            let crouch = (-jump).max(0.0);
            let target = ground + cfg.stand_height * (1.0 - 0.9 * crouch);
            if jump > 0.1 && self.root.z >= target - 0.05 {
                self.saturate(cfg.torque_cap * jump);
                self.root_vel.z = self.takeoff_speed(jump);
                self.airborne = true;
                self.root.z += self.root_vel.z * dt;
            } else {
                let u = self.saturate(
                    cfg.height_gain * (target - self.root.z) - cfg.height_damping * self.root_vel.z,
                );
                self.root_vel.z += u / cfg.leg_mass * dt;
                self.root.z += self.root_vel.z * dt;
                let top = ground + cfg.stand_height;
                if self.root.z > top {
                    self.root.z = top;
                    self.root_vel.z = self.root_vel.z.min(0.0);
                }
            }
        }
        self.root.x += self.root_vel.x * dt;
        self.root.y += self.root_vel.y * dt;

        // Markers.
        for m in 0..MARKERS {
            let base = channel::MARKER_BASE + 3 * m;
            let target = Vec3::new(act(base), act(base + 1), act(base + 2)) * self.reach(m);
            for k in 0..3 {
                let u = self.saturate(
                    cfg.marker_gain * (target[k] - self.disp[m][k]) - cfg.marker_damping * self.disp_vel[m][k],
                );
                self.disp_vel[m][k] += u / cfg.marker_mass * dt;
                self.disp[m][k] += self.disp_vel[m][k] * dt;
            }
        }
        self.refresh(ground);
    }

    fn refresh(&mut self, ground: f64) {
        let omega = Vec3::new(0.0, 0.0, self.yaw_rate);
        let rot = rot6_from_yaw(self.yaw);
        for j in 0..self.skeleton.joint_count {
            let r = self.skeleton.rest_offsets[j];
            let mut off = Vec3::new(r[0], r[1], r[2]);
            let mut dv = Vec3::zeros();
            for m in 0..MARKERS {
                let w = self.weights[j][m];
                if w != 0.0 {
                    off += self.disp[m] * w;
                    dv += self.disp_vel[m] * w;
                }
            }
            let world_off = rotate_z(&off, self.yaw);
            let mut pos = self.root + world_off;
            let mut vel = self.root_vel + omega.cross(&world_off) + rotate_z(&dv, self.yaw);
            if self.grounded_joints[j] && pos.z < ground + FOOT_CLEARANCE {
                pos.z = ground + FOOT_CLEARANCE;
                vel.z = vel.z.max(0.0);
            }
            self.state.joint_pos[j] = pos;
            self.state.lin_vel[j] = vel;
            self.state.ang_vel[j] = omega;
            self.state.joint_rot[j] = rot;
        }
    }
}

impl DynamicsBackend for ProxyHumanoid {
    fn skeleton(&self) -> &SkeletonSpec {
        &self.skeleton
    }

    fn reset(&mut self, initial: &BodyState) -> Result<()> {
        initial.validate(&self.skeleton)?;
        self.yaw = yaw_of(initial)?;
        self.root = initial.root_pos();
        self.root_vel = initial.root_vel();
        self.yaw_rate = initial.ang_vel[0].z;
        let omega = Vec3::new(0.0, 0.0, self.yaw_rate);
        for (m, &j) in self.markers.iter().enumerate() {
            let rel = initial.joint_pos[j] - self.root;
            let r = self.skeleton.rest_offsets[j];
            self.disp[m] = rotate_z(&rel, -self.yaw) - Vec3::new(r[0], r[1], r[2]);
            let dv = initial.lin_vel[j] - self.root_vel - omega.cross(&rel);
            self.disp_vel[m] = rotate_z(&dv, -self.yaw);
        }
        self.airborne = self.root.z > self.config.stand_height + 1e-6 || self.root_vel.z > 0.0;
        self.peak = 0.0;
        // Ground under the root is unknown here; leg clamping resumes on the
        // first step.
        self.refresh(f64::NEG_INFINITY);
        Ok(())
    }

    fn step(&mut self, action: &[f32], substeps: usize, dt: f64, scene: &StaticScene) -> Result<()> {
        if action.len() != self.skeleton.action_dim {
            return Err(Error::InvalidAction(format!(
                "expected {} action values, got {}",
                self.skeleton.action_dim,
                action.len()
            )));
        }
        self.peak = 0.0;
        for _ in 0..substeps {
            self.substep(action, dt, scene);
        }
        Ok(())
    }

    fn state(&self) -> &BodyState {
        &self.state
    }

    fn peak_actuation(&self) -> f64 {
        self.peak
    }

    fn torque_cap(&self) -> f64 {
        self.config.torque_cap
    }

    fn clone_box(&self) -> Box<dyn DynamicsBackend> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::object::Material;

    fn proxy() -> ProxyHumanoid {
        ProxyHumanoid::new(SkeletonSpec::smpl(), ProxyConfig::default()).unwrap()
    }

    fn scene() -> StaticScene {
        StaticScene::flat_ground(Material::default())
    }

    #[test]
    fn zero_action_keeps_rest_pose() {
        let mut p = proxy();
        let rest = BodyState::rest_pose(p.skeleton(), Vec3::new(1.0, 2.0, 0.95), 0.3);
        p.reset(&rest).unwrap();
        let zero = vec![0.0f32; 69];
        for _ in 0..120 {
            p.step(&zero, 2, 1.0 / 60.0, &scene()).unwrap();
        }
        for j in 0..24 {
            assert!((p.state().joint_pos[j] - rest.joint_pos[j]).norm() < 1e-9);
        }
        assert!(p.peak_actuation() < 1e-9);
    }

    #[test]
    fn full_throttle_saturates_at_cap() {
        let mut p = proxy();
        p.reset(&BodyState::rest_pose(p.skeleton(), Vec3::new(0.0, 0.0, 0.95), 0.0)).unwrap();
        let mut a = vec![0.0f32; 69];
        a[channel::FORWARD] = 1.0;
        a[channel::MARKER_BASE + 6] = 1.0;
        p.step(&a, 1, 1.0 / 60.0, &scene()).unwrap();
        assert_eq!(p.peak_actuation(), 500.0);
        for _ in 0..300 {
            p.step(&a, 2, 1.0 / 60.0, &scene()).unwrap();
            assert!(p.peak_actuation() <= 500.0);
        }
        assert!((p.state().root_vel().x - 10.0).abs() < 0.1);
    }

    #[test]
    fn jump_follows_ballistic_arc_and_lands() {
        let mut p = proxy();
        p.reset(&BodyState::rest_pose(p.skeleton(), Vec3::new(0.0, 0.0, 0.95), 0.0)).unwrap();
        let mut a = vec![0.0f32; 69];
        a[channel::JUMP] = 1.0;
        p.step(&a, 1, 1.0 / 60.0, &scene()).unwrap();
        assert!(p.is_airborne());
        a[channel::JUMP] = 0.0;
        let v0 = p.takeoff_speed(1.0);
        let mut apex: f64 = 0.0;
        for _ in 0..200 {
            p.step(&a, 1, 1.0 / 60.0, &scene()).unwrap();
            apex = apex.max(p.state().root_pos().z);
        }
        assert!(!p.is_airborne());
        let expected = 0.95 + v0 * v0 / (2.0 * GRAVITY);
        assert!((apex - expected).abs() < 0.1, "{apex} vs {expected}");
        assert!((p.state().root_pos().z - 0.95).abs() < 1e-9);
    }

    #[test]
    fn marker_reaches_target_and_drags_its_chain() {
        let mut p = proxy();
        p.reset(&BodyState::rest_pose(p.skeleton(), Vec3::new(0.0, 0.0, 0.95), 0.0)).unwrap();
        let mut a = vec![0.0f32; 69];
        // Right wrist forward by its full reach.
        a[channel::MARKER_BASE + 6] = 1.0;
        for _ in 0..60 {
            p.step(&a, 2, 1.0 / 60.0, &scene()).unwrap();
        }
        let s = p.state();
        let wrist = 21;
        assert!((s.joint_pos[wrist].x - (0.02 + 0.8)).abs() < 1e-3);
        // Hand follows rigidly; elbow partly.
        assert!((s.joint_pos[23].x - s.joint_pos[wrist].x - 0.01).abs() < 1e-3);
        assert!(s.joint_pos[19].x > 0.3 && s.joint_pos[19].x < 0.8);
        // Pelvis and left arm untouched.
        assert!(s.joint_pos[0].x.abs() < 1e-12);
        assert!(s.joint_pos[20].x - 0.02 < 1e-12);
    }

    #[test]
    fn deep_crouch_drops_root() {
        let mut p = proxy();
        p.reset(&BodyState::rest_pose(p.skeleton(), Vec3::new(0.0, 0.0, 0.95), 0.0)).unwrap();
        let mut a = vec![0.0f32; 69];
        a[channel::JUMP] = -1.0;
        for _ in 0..60 {
            p.step(&a, 2, 1.0 / 60.0, &scene()).unwrap();
        }
        assert!(p.state().root_pos().z < 0.15);
        for j in [7, 8, 10, 11] {
            assert!(p.state().joint_pos[j].z >= FOOT_CLEARANCE - 1e-12);
        }
    }

    #[test]
    fn wrong_action_length_is_rejected() {
        let mut p = proxy();
        assert!(matches!(
            p.step(&[0.0; 3], 1, 1.0 / 60.0, &scene()),
            Err(Error::InvalidAction(_))
        ));
    }

    #[test]
    fn smplx_proxy_moves_fingers_with_wrist() {
        let sk = SkeletonSpec::smplx();
        let mut p = ProxyHumanoid::new(sk.clone(), ProxyConfig::default()).unwrap();
        p.reset(&BodyState::rest_pose(&sk, Vec3::new(0.0, 0.0, 0.95), 0.0)).unwrap();
        let mut a = vec![0.0f32; 153];
        a[channel::MARKER_BASE + 8] = 1.0;
        for _ in 0..60 {
            p.step(&a, 2, 1.0 / 60.0, &scene()).unwrap();
        }
        let hand = sk.end_effectors.right_hand;
        let wrist = sk.end_effectors.right_wrist;
        let before = sk.rest_offsets[hand][2] - sk.rest_offsets[wrist][2];
        let after = p.state().joint_pos[hand].z - p.state().joint_pos[wrist].z;
        assert!((before - after).abs() < 1e-9);
    }
}
