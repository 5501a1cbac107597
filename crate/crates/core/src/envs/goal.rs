//! Observation assembly: heading-normalized proprioception followed by a
//! per-sport goal block.
//!
//! Every goal quantity is a world point or vector mapped through the
//! observing agent's [`HeadingFrame`], so a rigid yaw and x-y motion of the
//! whole scene leaves observations unchanged.

use arrayvec::ArrayVec;

use super::config::{Sport, SportConfig};
use crate::body::{BodyState, ContactSet, ObjectKinematics};
use crate::error::{Error, Result};
use crate::frame::{heading_normalize_into, yaw_of, HeadingFrame};
use crate::math::{rot6_from_quat, rotate_z2, wrap_angle, Quat, Vec2, Vec3};
use crate::physics::terrain::PATCH;
use crate::physics::WaveTerrain;

/// Largest number of agents in one environment.
pub const MAX_AGENTS: usize = 8;

/// A rectangular arena placed in the world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArenaFrame {
    pub center: Vec2,
    pub yaw: f64,
    /// Half length (local x) and half width (local y).
    pub half: [f64; 2],
}

impl ArenaFrame {
    pub fn centered(length: f64, width: f64) -> Self {
        ArenaFrame {
            center: Vec2::zeros(),
            yaw: 0.0,
            half: [length / 2.0, width / 2.0],
        }
    }

    pub fn local(&self, p: &Vec3) -> Vec2 {
        rotate_z2(&(p.xy() - self.center), -self.yaw)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let l = self.local(p);
        l.x.abs() <= self.half[0] && l.y.abs() <= self.half[1]
    }

    /// Signed distances to the +x, −x, +y and −y edges (positive inside).
    pub fn edge_distances(&self, p: &Vec3) -> [f64; 4] {
        let l = self.local(p);
        [self.half[0] - l.x, self.half[0] + l.x, self.half[1] - l.y, self.half[1] + l.y]
    }

    /// The same arena after rotating the world by `yaw` about the origin and
    /// shifting it by `shift`.
    pub fn transformed(&self, yaw: f64, shift: Vec2) -> Self {
        ArenaFrame {
            center: rotate_z2(&self.center, yaw) + shift,
            yaw: wrap_angle(self.yaw + yaw),
            half: self.half,
        }
    }
}

/// Per-sport goal entities for one observing agent.
#[derive(Debug, Clone)]
pub enum SportGoal<'a> {
    HighJump {
        goal: Vec3,
        /// Bar centre at bar height.
        bar: Vec3,
    },
    LongJump {
        goal: Vec3,
        /// Point on the jump line nearest the root.
        line_point: Vec3,
        root_vel: Vec3,
    },
    Hurdling {
        finish: Vec3,
        /// Hurdle centres at hurdle height.
        hurdles: &'a [Vec3],
    },
    Golf {
        ball: ObjectKinematics,
        target: Vec3,
        terrain: &'a WaveTerrain,
        spacing: f64,
    },
    Javelin {
        javelin: ObjectKinematics,
        elapsed: f64,
        throw_yaw: f64,
        held: bool,
    },
    Racket {
        ball: ObjectKinematics,
        target: Vec3,
        racket: Vec3,
    },
    Combat {
        opponent: &'a BodyState,
        targets: [usize; 5],
        tip: Vec3,
        own_contacts: &'a ContactSet,
        opp_contacts: &'a ContactSet,
        force_scale: f64,
        /// Present when the arena edges are observed.
        arena: Option<ArenaFrame>,
    },
    PenaltyKick {
        ball: ObjectKinematics,
        /// Bases of the two goal posts.
        posts: [Vec3; 2],
        target: Vec3,
    },
    SoccerMatch {
        ball: ObjectKinematics,
        /// Root position and velocity of every other player, teammates
        /// first.
        others: ArrayVec<(Vec3, Vec3), MAX_AGENTS>,
        attack_goal: Vec3,
        defend_goal: Vec3,
    },
    FreeThrow {
        ball: ObjectKinematics,
        hoop: Vec3,
        hand: Vec3,
    },
}

/// Goal-block length for `cfg` with `joint_count` joints per body.
pub fn goal_dim(cfg: &SportConfig, joint_count: usize) -> usize {
    match cfg.sport {
        Sport::HighJump => 6,
        Sport::LongJump => 9,
        Sport::Hurdling => 3 + 3 * cfg.arena.track.hurdle_count,
        Sport::Golf => 9 + PATCH * PATCH,
        Sport::Javelin => 19,
        Sport::Tennis | Sport::TableTennis => 12,
        Sport::Fencing => 8 * joint_count + 15 + 4,
        Sport::Boxing => 8 * joint_count + 15,
        Sport::PenaltyKick => 16,
        Sport::SoccerMatch => 10 + 6 * (cfg.agent_count() - 1),
        Sport::FreeThrow => 12,
    }
}

/// Full per-agent observation length.
pub fn obs_dim(cfg: &SportConfig, joint_count: usize) -> usize {
    BodyState::flat_len(joint_count) + goal_dim(cfg, joint_count)
}

struct Cursor<'o> {
    out: &'o mut [f64],
    at: usize,
}

impl Cursor<'_> {
    #[inline]
    fn push(&mut self, v: f64) {
        self.out[self.at] = v;
        self.at += 1;
    }

    #[inline]
    fn v3(&mut self, v: &Vec3) {
        self.push(v.x);
        self.push(v.y);
        self.push(v.z);
    }

    fn slice(&mut self, vals: &[f64]) {
        self.out[self.at..self.at + vals.len()].copy_from_slice(vals);
        self.at += vals.len();
    }
}

impl SportGoal<'_> {
    pub fn dim(&self) -> usize {
        match self {
            SportGoal::HighJump { .. } => 6,
            SportGoal::LongJump { .. } => 9,
            SportGoal::Hurdling { hurdles, .. } => 3 + 3 * hurdles.len(),
            SportGoal::Golf { .. } => 9 + PATCH * PATCH,
            SportGoal::Javelin { .. } => 19,
            SportGoal::Racket { .. } => 12,
            SportGoal::Combat { opponent, arena, .. } => {
                8 * opponent.joint_count() + 15 + if arena.is_some() { 4 } else { 0 }
            }
            SportGoal::PenaltyKick { .. } => 16,
            SportGoal::SoccerMatch { others, .. } => 10 + 6 * others.len(),
            SportGoal::FreeThrow { .. } => 12,
        }
    }

    /// Writes the goal block seen from `frame` (the observer's heading
    /// frame) into `out`, whose length must equal [`SportGoal::dim`].
    pub fn write(&self, frame: &HeadingFrame, out: &mut [f64]) -> Result<()> {
        if out.len() != self.dim() {
            return Err(Error::Config(format!(
                "goal block has {} slots, layout needs {}",
                out.len(),
                self.dim()
            )));
        }
        let mut c = Cursor { out, at: 0 };
        let pt = |p: &Vec3| frame.point(p);
        let vc = |v: &Vec3| frame.vector(v);
        match self {
            SportGoal::HighJump { goal, bar } => {
                c.v3(&pt(goal));
                c.v3(&pt(bar));
            }
            SportGoal::LongJump {
                goal,
                line_point,
                root_vel,
            } => {
                c.v3(&pt(goal));
                c.v3(&pt(line_point));
                c.v3(&vc(root_vel));
            }
            SportGoal::Hurdling { finish, hurdles } => {
                c.v3(&pt(finish));
                for h in *hurdles {
                    c.v3(&pt(h));
                }
            }
            SportGoal::Golf {
                ball,
                target,
                terrain,
                spacing,
            } => {
                c.v3(&pt(&ball.pos));
                c.v3(&vc(&ball.lin_vel));
                c.v3(&pt(target));
                let at = c.at;
                terrain.sample_patch(frame, &frame.origin, *spacing, &mut c.out[at..at + PATCH * PATCH]);
                c.at += PATCH * PATCH;
            }
            SportGoal::Javelin {
                javelin,
                elapsed,
                throw_yaw,
                held,
            } => {
                c.v3(&pt(&javelin.pos));
                c.slice(&frame.rot6(&rot6_from_quat(&javelin.orient)));
                c.v3(&vc(&javelin.lin_vel));
                c.v3(&vc(&javelin.ang_vel));
                c.push(*elapsed);
                let rel = wrap_angle(throw_yaw - frame.yaw);
                c.push(rel.cos());
                c.push(rel.sin());
                c.push(if *held { 1.0 } else { 0.0 });
            }
            SportGoal::Racket { ball, target, racket } => {
                c.v3(&pt(&ball.pos));
                c.v3(&vc(&ball.lin_vel));
                c.v3(&pt(target));
                c.v3(&pt(racket));
            }
            SportGoal::Combat {
                opponent,
                targets,
                tip,
                own_contacts,
                opp_contacts,
                force_scale,
                arena,
            } => {
                if own_contacts.forces.len() != opponent.joint_count()
                    || opp_contacts.forces.len() != opponent.joint_count()
                {
                    return Err(Error::Config("contact sets do not match the opponent skeleton".into()));
                }
                for p in &opponent.joint_pos {
                    c.v3(&pt(p));
                }
                for v in &opponent.lin_vel {
                    c.v3(&vc(v));
                }
                for &j in targets {
                    let d = opponent
                        .joint_pos
                        .get(j)
                        .ok_or_else(|| Error::Config(format!("target body {j} missing")))?
                        - tip;
                    c.v3(&vc(&d));
                }
                for n in own_contacts.per_body_sq_norms(*force_scale) {
                    c.push(n);
                }
                for n in opp_contacts.per_body_sq_norms(*force_scale) {
                    c.push(n);
                }
                if let Some(a) = arena {
                    // Observer root: the frame origin at any height.
                    let root = Vec3::new(frame.origin.x, frame.origin.y, 0.0);
                    c.slice(&a.edge_distances(&root));
                }
            }
            SportGoal::PenaltyKick { ball, posts, target } => {
                c.v3(&pt(&ball.pos));
                c.v3(&vc(&ball.lin_vel));
                c.v3(&vc(&ball.ang_vel));
                for p in posts {
                    let q = pt(p);
                    c.push(q.x);
                    c.push(q.y);
                }
                c.v3(&pt(target));
            }
            SportGoal::SoccerMatch {
                ball,
                others,
                attack_goal,
                defend_goal,
            } => {
                c.v3(&pt(&ball.pos));
                c.v3(&vc(&ball.lin_vel));
                for (p, v) in others {
                    c.v3(&pt(p));
                    c.v3(&vc(v));
                }
                let a = pt(attack_goal);
                let d = pt(defend_goal);
                c.push(a.x);
                c.push(a.y);
                c.push(d.x);
                c.push(d.y);
            }
            SportGoal::FreeThrow { ball, hoop, hand } => {
                c.v3(&pt(&ball.pos));
                c.v3(&vc(&ball.lin_vel));
                c.v3(&pt(hoop));
                c.v3(&pt(hand));
            }
        }
        debug_assert_eq!(c.at, c.out.len());
        Ok(())
    }
}

/// Writes the heading-normalized body into `out` as four blocks (joint
/// positions, 6-D rotations, linear velocities, angular velocities) and
/// returns the frame used. `scratch` must match the body's joint count.
pub fn write_proprio(state: &BodyState, scratch: &mut BodyState, out: &mut [f64]) -> Result<HeadingFrame> {
    let n = state.joint_count();
    if out.len() != BodyState::flat_len(n) || scratch.joint_count() != n {
        return Err(Error::Config(format!(
            "proprioception needs {} slots, got {}",
            BodyState::flat_len(n),
            out.len()
        )));
    }
    let yaw = yaw_of(state)?;
    heading_normalize_into(state, yaw, scratch)?;
    let (pos, rest) = out.split_at_mut(3 * n);
    let (rot, rest) = rest.split_at_mut(6 * n);
    let (lin, ang) = rest.split_at_mut(3 * n);
    for j in 0..n {
        pos[3 * j..3 * j + 3].copy_from_slice(scratch.joint_pos[j].as_slice());
        rot[6 * j..6 * j + 6].copy_from_slice(&scratch.joint_rot[j]);
        lin[3 * j..3 * j + 3].copy_from_slice(scratch.lin_vel[j].as_slice());
        ang[3 * j..3 * j + 3].copy_from_slice(scratch.ang_vel[j].as_slice());
    }
    let r = state.root_pos();
    Ok(HeadingFrame::new(Vec2::new(r.x, r.y), yaw))
}

/// Quaternion of a yaw rotation, for callers building goal snapshots.
pub fn yaw_quat(yaw: f64) -> Quat {
    Quat::from_axis_angle(&Vec3::z_axis(), yaw)
}
