//! Reward kernels. Each kernel is a pure function of a small input struct
//! and returns every term with its weight, so the weighted sum can be
//! audited step by step.
//!
//! Progress terms take the previous step's positions from the caller; on
//! the first step of an episode callers pass the current positions again,
//! which makes the first progress value zero.

use std::f64::consts::FRAC_PI_6;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::ballistics::{descending_crossing, desired_throw_velocity_with, LaunchState, ThrowConvention};
use crate::error::{Error, Result};
use crate::math::{rot6_from_quat, Quat, Vec2, Vec3, GRAVITY};

pub const MAX_TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: &'static str,
    /// Unweighted value.
    pub value: f64,
    pub weight: f64,
}

/// Named terms, their weights, the weighted total, and which piecewise
/// branch produced them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RewardBreakdown {
    terms: ArrayVec<Term, MAX_TERMS>,
    total: f64,
    branch: u8,
}

impl RewardBreakdown {
    fn build(branch: u8, terms: &[(&'static str, f64, f64)]) -> Self {
        let mut out = RewardBreakdown {
            branch,
            ..Default::default()
        };
        for &(name, value, weight) in terms {
            out.terms.push(Term { name, value, weight });
            out.total += weight * value;
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn branch(&self) -> u8 {
        self.branch
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn weight(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.weight)
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.terms.iter().all(|t| t.value.is_finite() && t.weight.is_finite())
    }

    /// A zero reward with no terms, used when an environment faults.
    pub fn zero() -> Self {
        Self::default()
    }
}

#[inline]
fn progress(prev: &Vec3, cur: &Vec3, goal: &Vec3) -> f64 {
    (prev - goal).norm() - (cur - goal).norm()
}

#[inline]
fn clamp_progress(prev: &Vec3, cur: &Vec3, goal: &Vec3) -> f64 {
    progress(prev, cur, goal).clamp(0.0, 1.0)
}

/// Speed scale at which the velocity-alignment terms saturate, m/s.
pub const ALIGN_SPEED: f64 = 1.5;

/// `clamp(v_xy · d̂ / 1.5, 0, 1)` where `d̂` is the x-y direction from
/// `from` to `to`; zero when the two points coincide in x-y.
pub fn velocity_alignment(vel: &Vec3, from: &Vec3, to: &Vec3) -> f64 {
    let d = Vec2::new(to.x - from.x, to.y - from.y);
    let n = d.norm();
    if n < 1e-12 {
        return 0.0;
    }
    ((vel.x * d.x + vel.y * d.y) / n / ALIGN_SPEED).clamp(0.0, 1.0)
}

/// Landing x-y on the ground plane; an object already below it lands where
/// it is.
fn ground_landing(pos: &Vec3, vel: &Vec3) -> Vec2 {
    if pos.z < 0.0 {
        return Vec2::new(pos.x, pos.y);
    }
    descending_crossing(&LaunchState::new(*pos, *vel), 0.0).unwrap_or_else(|| Vec2::new(pos.x, pos.y))
}

fn xy_dist_sq(a: &Vec2, b: &Vec3) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

// ---------------------------------------------------------------- jumps

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighJumpInput {
    pub prev_root: Vec3,
    pub root: Vec3,
    pub goal: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HighJumpWeights {
    pub p: f64,
    pub h: f64,
    /// Height-reward window on root x.
    pub window: [f64; 2],
}

impl Default for HighJumpWeights {
    fn default() -> Self {
        HighJumpWeights {
            p: 1.0,
            h: 1.0,
            window: [19.5, 20.5],
        }
    }
}

pub const HIGH_JUMP_GOAL: [f64; 3] = [22.0, 6.0, 1.0];

pub fn reward_high_jump(i: &HighJumpInput, w: &HighJumpWeights) -> RewardBreakdown {
    let r_p = clamp_progress(&i.prev_root, &i.root, &i.goal);
    let r_h = i.root.z;
    let x = i.root.x;
    let (branch, wh) = if x <= w.window[0] {
        (0, 0.0)
    } else if x < w.window[1] {
        (1, w.h)
    } else {
        (2, 0.0)
    };
    RewardBreakdown::build(branch, &[("p", r_p, w.p), ("h", r_h, wh)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongJumpInput {
    pub prev_root: Vec3,
    pub root: Vec3,
    pub root_vel: Vec3,
    pub goal: Vec3,
    pub jump_line_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LongJumpWeights {
    pub p: f64,
    pub v: f64,
    pub h: f64,
    pub l: f64,
}

impl Default for LongJumpWeights {
    fn default() -> Self {
        LongJumpWeights {
            p: 1.0,
            v: 0.01,
            h: 0.1,
            l: 30.0,
        }
    }
}

pub const LONG_JUMP_GOAL: [f64; 3] = [30.0, 0.0, 1.0];

pub fn reward_long_jump(i: &LongJumpInput, w: &LongJumpWeights) -> RewardBreakdown {
    let r_p = clamp_progress(&i.prev_root, &i.root, &i.goal);
    let r_v = i.root_vel.x;
    let r_h = i.root.z;
    let r_l = i.root.x - i.jump_line_x;
    let past = i.root.x > i.jump_line_x;
    let (wh, wl) = if past { (w.h, w.l) } else { (0.0, 0.0) };
    RewardBreakdown::build(
        past as u8,
        &[("p", r_p, w.p), ("v", r_v, w.v), ("h", r_h, wh), ("l", r_l, wl)],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurdlingInput {
    pub prev_root: Vec3,
    pub root: Vec3,
    pub finish: Vec3,
}

pub fn reward_hurdling(i: &HurdlingInput, weight: f64) -> RewardBreakdown {
    RewardBreakdown::build(0, &[("distance", clamp_progress(&i.prev_root, &i.root, &i.finish), weight)])
}

// ---------------------------------------------------------------- golf

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GolfPredConvention {
    /// Predicted landing point against the target.
    #[default]
    Target,
    /// Predicted landing point against the ball's own x-y position.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GolfInput {
    pub prev_ball: Vec3,
    pub ball: Vec3,
    pub ball_vel: Vec3,
    pub club: Vec3,
    pub target: Vec3,
    pub contact_latched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GolfWeights {
    pub p: f64,
    pub c: f64,
    pub g: f64,
    pub pred: f64,
    pub pred_convention: GolfPredConvention,
}

impl Default for GolfWeights {
    fn default() -> Self {
        GolfWeights {
            p: 1.0,
            c: 1.0,
            g: 1.0,
            pred: 1.0,
            pred_convention: GolfPredConvention::Target,
        }
    }
}

pub fn reward_golf(i: &GolfInput, w: &GolfWeights) -> RewardBreakdown {
    let r_p = clamp_progress(&i.prev_ball, &i.ball, &i.target);
    let r_c = if i.contact_latched {
        1.0
    } else {
        (-100.0 * (i.ball - i.club).norm_squared()).exp()
    };
    let r_g = (-0.1 * xy_dist_sq(&Vec2::new(i.ball.x, i.ball.y), &i.target)).exp();
    let land = ground_landing(&i.ball, &i.ball_vel);
    let pred_ref = match w.pred_convention {
        GolfPredConvention::Target => i.target,
        GolfPredConvention::Literal => i.ball,
    };
    let r_pred = (-0.1 * xy_dist_sq(&land, &pred_ref)).exp();
    RewardBreakdown::build(
        i.contact_latched as u8,
        &[("p", r_p, w.p), ("c", r_c, w.c), ("g", r_g, w.g), ("pred", r_pred, w.pred)],
    )
}

// ---------------------------------------------------------------- javelin

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JavelinInput {
    /// Seconds since episode start.
    pub t: f64,
    pub hand: Vec3,
    pub javelin_pos: Vec3,
    pub prev_javelin_pos: Vec3,
    pub javelin_orient: Quat,
    pub root: Vec3,
    pub spawn_root: Vec3,
    /// Heading of the throw; forward progress is measured along it.
    pub throw_yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JavelinWeights {
    pub stage_times: [f64; 2],
    pub hold: [f64; 2],
    pub throw: [f64; 3],
    pub fly: [f64; 2],
}

impl Default for JavelinWeights {
    fn default() -> Self {
        JavelinWeights {
            stage_times: [0.6, 1.2],
            // grab, js
            hold: [0.9, 0.1],
            // goal, s, grab
            throw: [0.9, 0.05, -0.05],
            // goal, js
            fly: [0.9, 0.1],
        }
    }
}

/// Flying pose: facing `yaw` and pitched 30° up.
pub fn javelin_default_orient(yaw: f64) -> Quat {
    Quat::from_axis_angle(&Vec3::z_axis(), yaw) * Quat::from_axis_angle(&Vec3::y_axis(), -FRAC_PI_6)
}

pub fn reward_javelin(i: &JavelinInput, w: &JavelinWeights) -> Result<RewardBreakdown> {
    if !(i.t >= 0.0) {
        return Err(Error::Domain(format!("javelin stage time must be ≥ 0, got {}", i.t)));
    }
    let r_grab = (-(i.hand - i.javelin_pos).norm_squared()).exp();
    let q = rot6_from_quat(&i.javelin_orient);
    let q0 = rot6_from_quat(&javelin_default_orient(i.throw_yaw));
    let pose_err: f64 = q.iter().zip(q0.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let r_js = (-pose_err).exp();
    let r_s = (-(i.root - i.spawn_root).norm_squared()).exp();
    let (s, c) = i.throw_yaw.sin_cos();
    let d = i.javelin_pos - i.prev_javelin_pos;
    let r_goal = (c * d.x + s * d.y).clamp(0.0, 1.0);
    let (branch, wg, wj, wgoal, ws) = if i.t < w.stage_times[0] {
        (0, w.hold[0], w.hold[1], 0.0, 0.0)
    } else if i.t < w.stage_times[1] {
        (1, w.throw[2], 0.0, w.throw[0], w.throw[1])
    } else {
        (2, 0.0, w.fly[1], w.fly[0], 0.0)
    };
    Ok(RewardBreakdown::build(
        branch,
        &[("grab", r_grab, wg), ("js", r_js, wj), ("goal", r_goal, wgoal), ("s", r_s, ws)],
    ))
}

/// Squared 6-DoF pose error of the javelin against its flying pose.
pub fn javelin_pose_error(orient: &Quat, throw_yaw: f64) -> f64 {
    let q = rot6_from_quat(orient);
    let q0 = rot6_from_quat(&javelin_default_orient(throw_yaw));
    q.iter().zip(q0.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

// ---------------------------------------------------------------- rackets

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RacketSport {
    Tennis,
    TableTennis,
}

pub const TABLE_HEIGHT: f64 = 0.76;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RacketInput {
    pub racket: Vec3,
    pub ball: Vec3,
    pub ball_vel: Vec3,
    pub target: Vec3,
    pub contact_latched: bool,
    pub n_hits: u32,
    pub sport: RacketSport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RacketWeights {
    pub racket: f64,
    pub ball: f64,
    pub plane_height: f64,
}

impl Default for RacketWeights {
    fn default() -> Self {
        RacketWeights {
            racket: 1.0,
            ball: 1.0,
            plane_height: TABLE_HEIGHT,
        }
    }
}

pub fn reward_racket(i: &RacketInput, w: &RacketWeights) -> RewardBreakdown {
    let r_racket = (-(i.racket - i.ball).norm_squared()).exp();
    let launch = LaunchState::new(i.ball, i.ball_vel);
    let land = match i.sport {
        RacketSport::Tennis => Some(ground_landing(&i.ball, &i.ball_vel)),
        RacketSport::TableTennis => descending_crossing(&launch, w.plane_height),
    };
    let near = land.map_or(0.0, |p| (-xy_dist_sq(&p, &i.target)).exp());
    let hits = match i.sport {
        RacketSport::Tennis => 0.0,
        RacketSport::TableTennis => i.n_hits as f64,
    };
    let r_ball = 1.0 + near + hits;
    let (wr, wb) = if i.contact_latched { (0.0, w.ball) } else { (w.racket, 0.0) };
    RewardBreakdown::build(i.contact_latched as u8, &[("racket", r_racket, wr), ("ball", r_ball, wb)])
}

// ---------------------------------------------------------------- combat

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombatInput {
    pub root: Vec3,
    pub root_vel: Vec3,
    pub yaw: f64,
    pub opp_root: Vec3,
    /// Sword tip or striking hand.
    pub tip: Vec3,
    pub targets: [Vec3; 5],
    pub point: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CombatWeights {
    pub facing: f64,
    pub vel: f64,
    pub strike: f64,
    pub point: f64,
    /// Contact force needed for a point, N.
    pub point_force: f64,
    /// Tip-to-target distance needed for a point, m.
    pub point_distance: f64,
}

impl Default for CombatWeights {
    fn default() -> Self {
        CombatWeights {
            facing: 0.1,
            vel: 0.1,
            strike: 0.6,
            point: 1.0,
            point_force: 50.0,
            point_distance: 0.1,
        }
    }
}

/// Smallest tip-to-target distance.
pub fn min_target_distance(tip: &Vec3, targets: &[Vec3]) -> f64 {
    targets.iter().map(|t| (tip - t).norm()).fold(f64::INFINITY, f64::min)
}

pub fn point_condition(min_distance: f64, force: f64, w: &CombatWeights) -> bool {
    min_distance <= w.point_distance && force >= w.point_force
}

pub fn reward_combat(i: &CombatInput, w: &CombatWeights) -> RewardBreakdown {
    let d = Vec2::new(i.opp_root.x - i.root.x, i.opp_root.y - i.root.y);
    let n = d.norm();
    let r_facing = if n < 1e-12 {
        0.0
    } else {
        let (s, c) = i.yaw.sin_cos();
        ((c * d.x + s * d.y) / n).clamp(0.0, 1.0)
    };
    let r_vel = velocity_alignment(&i.root_vel, &i.root, &i.opp_root);
    let dmin = min_target_distance(&i.tip, &i.targets);
    let r_strike = (-10.0 * dmin * dmin).exp();
    let r_point = if i.point { 1.0 } else { 0.0 };
    RewardBreakdown::build(
        i.point as u8,
        &[
            ("facing", r_facing, w.facing),
            ("vel", r_vel, w.vel),
            ("strike", r_strike, w.strike),
            ("point", r_point, w.point),
        ],
    )
}

// ---------------------------------------------------------------- soccer

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyKickInput {
    pub prev_root: Vec3,
    pub root: Vec3,
    pub prev_ball: Vec3,
    pub ball: Vec3,
    pub ball_vel: Vec3,
    pub target: Vec3,
    pub ball_spawn_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyKickWeights {
    pub p2b: f64,
    pub b2g: f64,
    pub bv2g: f64,
    pub b2t: f64,
    /// Penalty charged while the root is past the ball's spawn point.
    pub no_dribble: f64,
}

impl Default for PenaltyKickWeights {
    fn default() -> Self {
        PenaltyKickWeights {
            p2b: 0.4,
            b2g: 0.1,
            bv2g: 0.1,
            b2t: 0.8,
            no_dribble: 1.0,
        }
    }
}

pub fn reward_penalty_kick(i: &PenaltyKickInput, w: &PenaltyKickWeights) -> RewardBreakdown {
    let g_b2g = progress(&i.prev_ball, &i.ball, &i.target);
    let r_p2b = (i.prev_root - i.prev_ball).norm() - (i.root - i.ball).norm();
    let r_bv2g = velocity_alignment(&i.ball_vel, &i.ball, &i.target);
    let land = ground_landing(&i.ball, &i.ball_vel);
    let r_b2t = (-xy_dist_sq(&land, &i.target)).exp();
    let dribbling = if i.root.x > i.ball_spawn_x { 1.0 } else { 0.0 };
    let moving = g_b2g > 0.0;
    let (wp, wg, wv, wt) = if moving {
        (0.0, w.b2g, w.bv2g, w.b2t)
    } else {
        (w.p2b, 0.0, 0.0, 0.0)
    };
    RewardBreakdown::build(
        moving as u8,
        &[
            ("p2b", r_p2b, wp),
            ("b2g", g_b2g, wg),
            ("bv2g", r_bv2g, wv),
            ("b2t", r_b2t, wt),
            ("no_dribble", dribbling, -w.no_dribble),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoccerMatchInput {
    pub prev_root: Vec3,
    pub root: Vec3,
    pub prev_ball: Vec3,
    pub ball: Vec3,
    pub ball_vel: Vec3,
    /// Centre of the goal this agent attacks.
    pub target: Vec3,
    /// +1 own side scored this step, −1 conceded, 0 otherwise.
    pub scored: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoccerMatchWeights {
    pub p2b: f64,
    pub b2g: f64,
    pub bv2g: f64,
    pub point: f64,
    /// Root-to-ball x-y distance beyond which ball terms are zeroed.
    pub gate: f64,
}

impl Default for SoccerMatchWeights {
    fn default() -> Self {
        SoccerMatchWeights {
            p2b: 0.4,
            b2g: 0.1,
            bv2g: 0.1,
            point: 100.0,
            gate: 0.5,
        }
    }
}

pub fn reward_soccer_match(i: &SoccerMatchInput, w: &SoccerMatchWeights) -> RewardBreakdown {
    let r_p2b = (i.prev_root - i.prev_ball).norm() - (i.root - i.ball).norm();
    let near = (i.root.x - i.ball.x).hypot(i.root.y - i.ball.y) <= w.gate;
    let (r_b2g, r_bv2g) = if near {
        (
            progress(&i.prev_ball, &i.ball, &i.target),
            velocity_alignment(&i.ball_vel, &i.ball, &i.target),
        )
    } else {
        (0.0, 0.0)
    };
    RewardBreakdown::build(
        near as u8,
        &[
            ("p2b", r_p2b, w.p2b),
            ("b2g", r_b2g, w.b2g),
            ("bv2g", r_bv2g, w.bv2g),
            ("point", i.scored as f64, w.point),
        ],
    )
}

// ---------------------------------------------------------------- basketball

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeThrowInput {
    pub ball: Vec3,
    pub ball_vel: Vec3,
    pub hoop: Vec3,
    /// The ball went down through the hoop this step (first time only).
    pub basket: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FreeThrowWeights {
    pub ballvel: f64,
    pub bv2g: f64,
    pub basket: f64,
    pub convention: ThrowConvention,
}

impl Default for FreeThrowWeights {
    fn default() -> Self {
        FreeThrowWeights {
            ballvel: 0.5,
            bv2g: 0.5,
            basket: 1.0,
            convention: ThrowConvention::PassThrough,
        }
    }
}

pub fn reward_free_throw(i: &FreeThrowInput, w: &FreeThrowWeights) -> Result<RewardBreakdown> {
    let desired = desired_throw_velocity_with(&i.ball, &i.hoop, GRAVITY, w.convention)?;
    let r_ballvel = (-0.1 * (i.ball_vel - desired).norm_squared()).exp();
    let r_bv2g = velocity_alignment(&i.ball_vel, &i.ball, &i.hoop);
    let r_basket = if i.basket { 1.0 } else { 0.0 };
    Ok(RewardBreakdown::build(
        i.basket as u8,
        &[("ballvel", r_ballvel, w.ballvel), ("bv2g", r_bv2g, w.bv2g), ("basket", r_basket, w.basket)],
    ))
}
