//! Contacts between agent-carried geometry and objects, other agents, and
//! bars.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::body::{BodyState, ContactPair};
use crate::math::{matrix_from_rot6, Vec3};

/// Shapes in the implement's local frame; local +x points forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImplementShape {
    /// Flat face with its normal along local x (racket, paddle).
    Disc { radius: f64, half_thickness: f64 },
    /// Along local x (sword).
    Capsule { radius: f64, half_length: f64 },
    Box { half_extents: [f64; 3] },
    Sphere { radius: f64 },
}

/// Geometry rigidly attached to a joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Implement {
    pub shape: ImplementShape,
    pub joint: usize,
    /// Centre offset in the joint frame.
    pub offset: [f64; 3],
    pub restitution: f64,
    pub pair: ContactPair,
}

/// World pose of an implement at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplementPose {
    pub center: Vec3,
    pub rot: Matrix3<f64>,
    pub vel: Vec3,
}

impl Implement {
    pub fn pose(&self, state: &BodyState) -> ImplementPose {
        let j = self.joint;
        let rot = matrix_from_rot6(&state.joint_rot[j]).unwrap_or_else(Matrix3::identity);
        let arm = rot * Vec3::new(self.offset[0], self.offset[1], self.offset[2]);
        ImplementPose {
            center: state.joint_pos[j] + arm,
            rot,
            vel: state.lin_vel[j] + state.ang_vel[j].cross(&arm),
        }
    }

    /// Striking point: the forward end of a capsule, otherwise the centre.
    pub fn tip(&self, pose: &ImplementPose) -> Vec3 {
        match self.shape {
            ImplementShape::Capsule { half_length, .. } => pose.center + pose.rot * Vec3::x() * half_length,
            _ => pose.center,
        }
    }

    pub fn offset_norm(&self) -> f64 {
        Vec3::new(self.offset[0], self.offset[1], self.offset[2]).norm()
    }
}

/// Result of a swept test: fraction along the path and the outward normal
/// in the shape's local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepHit {
    pub s: f64,
    pub normal: Vec3,
}

fn ray_sphere(r0: &Vec3, d: &Vec3, radius: f64) -> Option<f64> {
    let c = r0.norm_squared() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let a = d.norm_squared();
    if a == 0.0 {
        return None;
    }
    let b = r0.dot(d);
    let disc = b * b - a * c;
    if disc < 0.0 || b >= 0.0 {
        return None;
    }
    let s = (-b - disc.sqrt()) / a;
    (s <= 1.0).then_some(s)
}

fn ray_box(r0: &Vec3, d: &Vec3, half: &Vec3) -> Option<(f64, Vec3)> {
    if (0..3).all(|k| r0[k].abs() <= half[k]) {
        // Start overlapping: push out through the nearest face.
        let k = (0..3)
            .min_by(|&a, &b| (half[a] - r0[a].abs()).total_cmp(&(half[b] - r0[b].abs())))
            .unwrap_or(0);
        let mut n = Vec3::zeros();
        n[k] = if r0[k] >= 0.0 { 1.0 } else { -1.0 };
        return Some((0.0, n));
    }
    let mut t_in = f64::NEG_INFINITY;
    let mut t_out = f64::INFINITY;
    let mut axis = 0;
    let mut sign = 1.0;
    for k in 0..3 {
        if d[k].abs() < 1e-15 {
            if r0[k].abs() > half[k] {
                return None;
            }
            continue;
        }
        let mut t1 = (-half[k] - r0[k]) / d[k];
        let mut t2 = (half[k] - r0[k]) / d[k];
        let mut s = -1.0;
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
            s = 1.0;
        }
        if t1 > t_in {
            t_in = t1;
            axis = k;
            sign = s;
        }
        t_out = t_out.min(t2);
    }
    if t_in > t_out || !(0.0..=1.0).contains(&t_in) {
        return None;
    }
    let mut n = Vec3::zeros();
    n[axis] = sign;
    Some((t_in, n))
}

fn segment_point_distance(a: &Vec3, b: &Vec3, p: &Vec3) -> (f64, Vec3) {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared().max(1e-30)).clamp(0.0, 1.0);
    let q = a + ab * t;
    ((p - q).norm(), q)
}

/// Sweeps a sphere of radius `r` from `r0` to `r1` (shape-local frame)
/// against `shape`.
pub fn sweep_sphere(shape: &ImplementShape, r0: &Vec3, r1: &Vec3, r: f64) -> Option<SweepHit> {
    let d = r1 - r0;
    match *shape {
        ImplementShape::Sphere { radius } => {
            let s = ray_sphere(r0, &d, radius + r)?;
            let p = r0 + d * s;
            let n = if p.norm() > 0.0 { p.normalize() } else { Vec3::z() };
            Some(SweepHit { s, normal: n })
        }
        ImplementShape::Box { half_extents } => {
            let half = Vec3::new(half_extents[0] + r, half_extents[1] + r, half_extents[2] + r);
            ray_box(r0, &d, &half).map(|(s, normal)| SweepHit { s, normal })
        }
        ImplementShape::Disc {
            radius,
            half_thickness,
        } => {
            let slab = half_thickness + r;
            let radial = |p: &Vec3| p.y.hypot(p.z);
            if r0.x.abs() <= slab {
                if radial(r0) <= radius {
                    let n = if r0.x >= 0.0 { Vec3::x() } else { -Vec3::x() };
                    return Some(SweepHit { s: 0.0, normal: n });
                }
                return None;
            }
            let side = r0.x.signum();
            if d.x * side >= 0.0 {
                return None;
            }
            let s = (side * slab - r0.x) / d.x;
            if !(0.0..=1.0).contains(&s) {
                return None;
            }
            let p = r0 + d * s;
            (radial(&p) <= radius).then(|| SweepHit {
                s,
                normal: Vec3::x() * side,
            })
        }
        ImplementShape::Capsule {
            radius,
            half_length,
        } => {
            let a = Vec3::new(-half_length, 0.0, 0.0);
            let b = Vec3::new(half_length, 0.0, 0.0);
            const SAMPLES: usize = 16;
            for i in 0..=SAMPLES {
                let s = i as f64 / SAMPLES as f64;
                let p = r0 + d * s;
                let (dist, q) = segment_point_distance(&a, &b, &p);
                if dist <= radius + r {
                    let n = if dist > 0.0 { (p - q) / dist } else { Vec3::z() };
                    return Some(SweepHit { s, normal: n });
                }
            }
            None
        }
    }
}

/// Velocity change for a free sphere hitting moving kinematic geometry with
/// restitution `e` along world normal `n`. Zero when separating.
pub fn kinematic_impulse(ball_vel: &Vec3, surface_vel: &Vec3, n: &Vec3, e: f64) -> Vec3 {
    let vn = (ball_vel - surface_vel).dot(n);
    if vn >= 0.0 {
        Vec3::zeros()
    } else {
        -n * ((1.0 + e) * vn)
    }
}

/// Strike detection: a point `tip` moving at `tip_vel` against target
/// spheres of `target_radius` centred on `targets` of `defender`.
/// Returns (joint index, force estimate) of the deepest target hit.
pub fn strike(
    tip: &Vec3,
    tip_vel: &Vec3,
    defender: &BodyState,
    targets: &[usize],
    target_radius: f64,
    effective_mass: f64,
    dt: f64,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for &j in targets {
        let rel = tip - defender.joint_pos[j];
        let dist = rel.norm();
        let signed = dist - target_radius;
        if signed > 0.0 {
            continue;
        }
        let n = if dist > 0.0 { rel / dist } else { Vec3::z() };
        let approach = (-(tip_vel - defender.lin_vel[j]).dot(&n)).max(0.0);
        let force = effective_mass * approach / dt;
        if best.map_or(true, |(_, _, s)| signed < s) {
            best = Some((j, force, signed));
        }
    }
    best.map(|(j, f, _)| (j, f))
}

/// Where a joint moving from `a` to `b` crosses the plane `x = x0`, if it
/// does.
pub fn plane_crossing(a: &Vec3, b: &Vec3, x0: f64) -> Option<Vec3> {
    let (da, db) = (a.x - x0, b.x - x0);
    if !(da * db < 0.0 || (db == 0.0 && da != 0.0)) {
        return None;
    }
    Some(a + (b - a) * (da / (da - db)))
}
