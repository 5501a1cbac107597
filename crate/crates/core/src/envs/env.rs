//! A single steppable sports environment.

use std::f64::consts::{FRAC_PI_2, PI};

use arrayvec::ArrayVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Sport, SportConfig};
use super::goal::{goal_dim, obs_dim, write_proprio, ArenaFrame, SportGoal, MAX_AGENTS};
use super::state::{EpisodeSummary, MatchState};
use super::termination::{check_termination, elapsed, javelin_stage, TermSnapshot, TerminationReason};
use crate::ballistics::launch_to_land;
use crate::body::{BodyState, ContactPair, ObjectKinematics};
use crate::error::{Error, Result};
use crate::frame::yaw_of;
use crate::math::{rotate_z, Vec2, Vec3, GRAVITY};
use crate::physics::{
    box_faces, control_step, Bar, DynamicsBackend, Implement, ImplementShape, Interaction, Material,
    ObjectSpec, ProxyHumanoid, Shape, SimObject, StaticScene, SurfaceId, WaveTerrain, World,
};
use crate::rewards::{
    javelin_default_orient, javelin_pose_error, min_target_distance, point_condition, reward_combat,
    reward_free_throw, reward_golf, reward_high_jump, reward_hurdling, reward_javelin, reward_long_jump,
    reward_penalty_kick, reward_racket, reward_soccer_match, CombatInput, FreeThrowInput, GolfInput,
    HighJumpInput, HurdlingInput, JavelinInput, LongJumpInput, PenaltyKickInput, RacketInput, RacketSport,
    RewardBreakdown, SoccerMatchInput,
};
use crate::skeleton::SkeletonSpec;

/// Ball speed below which a struck golf ball counts as at rest.
const REST_SPEED: f64 = 0.05;
/// Extra run-off around the jump and track areas before off-track fires.
const TRACK_MARGIN: f64 = 5.0;
const NET_RESTITUTION: f64 = 0.1;

/// Outcome of one environment step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub done: bool,
    pub reason: Option<TerminationReason>,
}

/// Facts accumulated over one episode.
#[derive(Debug, Clone, Copy, Default)]
struct Tracker {
    spawn_root: Vec3,
    ball_spawn: Vec3,
    target: Vec3,
    level: Option<f64>,
    // high jump
    window_max_z: f64,
    bar_cleared: bool,
    bar_failed: bool,
    // long jump
    was_airborne: bool,
    prev_vz: f64,
    takeoff_x: f64,
    landing_x: Option<f64>,
    // hurdling, jumps
    max_root_x: f64,
    max_root_z: f64,
    // golf
    contact_step: Option<u32>,
    ball_at_contact: Vec3,
    // javelin
    landed_at: Option<Vec3>,
    // racket rallies
    own_bounces: u8,
    returned: bool,
    error_sum: f64,
    error_count: u32,
    // kicks, throws
    scored: bool,
    crossing_error: Option<f64>,
    ball_out: bool,
    released: bool,
    lost: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pending {
    Nothing,
    Relaunch,
    CenterBall,
}

/// One environment instance: a world, its sport rules and the episode RNG.
#[derive(Debug, Clone)]
pub struct SportEnv {
    cfg: SportConfig,
    skeleton: SkeletonSpec,
    world: World,
    arena: ArenaFrame,
    hurdle_tops: Vec<Vec3>,
    seed: u64,
    stream: u64,
    episode: u64,
    rng: ChaCha8Rng,
    steps: u32,
    tracker: Tracker,
    match_state: MatchState,
    scratch: BodyState,
    obs64: Vec<f64>,
    rewards: ArrayVec<RewardBreakdown, MAX_AGENTS>,
    returns: ArrayVec<f64, MAX_AGENTS>,
    done: Option<TerminationReason>,
    last_snapshot: TermSnapshot,
    obs_dim: usize,
    agent_action_dim: usize,
}

fn episode_rng(seed: u64, stream: u64, episode: u64, tag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&episode.to_le_bytes());
    key[24..].copy_from_slice(&tag.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn flat_scene() -> StaticScene {
    StaticScene::flat_ground(Material::default())
}

fn net_material() -> Material {
    Material {
        restitution: NET_RESTITUTION,
        rolling: 1.0,
    }
}

impl SportEnv {
    /// Builds the environment for stream `stream` of run `seed` and resets
    /// it to episode 0.
    pub fn new(cfg: SportConfig, seed: u64, stream: u64) -> Result<Self> {
        cfg.validate()?;
        let skeleton = cfg.skeleton_spec();
        skeleton.validate()?;
        let n_agents = cfg.agent_count();
        if n_agents > MAX_AGENTS {
            return Err(Error::Config(format!("{n_agents} agents exceed the limit of {MAX_AGENTS}")));
        }
        let (world, arena) = build_world(&cfg, &skeleton)?;
        let n = skeleton.joint_count;
        let od = obs_dim(&cfg, n);
        let mut env = SportEnv {
            hurdle_tops: vec![Vec3::zeros(); cfg.arena.track.hurdle_count],
            agent_action_dim: skeleton.action_dim,
            obs_dim: od,
            scratch: BodyState::zeros(n),
            obs64: vec![0.0; od],
            skeleton,
            world,
            arena,
            seed,
            stream,
            episode: 0,
            rng: episode_rng(seed, stream, 0, 0),
            steps: 0,
            tracker: Tracker::default(),
            match_state: MatchState::default(),
            rewards: (0..n_agents).map(|_| RewardBreakdown::zero()).collect(),
            returns: (0..n_agents).map(|_| 0.0).collect(),
            done: None,
            last_snapshot: TermSnapshot::default(),
            cfg,
        };
        env.reset_episode(0)?;
        Ok(env)
    }

    pub fn config(&self) -> &SportConfig {
        &self.cfg
    }

    pub fn sport(&self) -> Sport {
        self.cfg.sport
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Mutable world access for tests and tools that stage scenarios.
    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn arena(&self) -> &ArenaFrame {
        &self.arena
    }

    pub fn agent_count(&self) -> usize {
        self.world.agents.len()
    }

    /// Observation length per agent.
    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    /// Action length per agent.
    pub fn action_dim(&self) -> usize {
        self.agent_action_dim
    }

    pub fn goal_dim(&self) -> usize {
        goal_dim(&self.cfg, self.skeleton.joint_count)
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn episode(&self) -> u64 {
        self.episode
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn elapsed(&self) -> f64 {
        elapsed(self.steps)
    }

    pub fn match_state(&self) -> &MatchState {
        &self.match_state
    }

    /// Per-agent reward breakdowns of the last step.
    pub fn rewards(&self) -> &[RewardBreakdown] {
        &self.rewards
    }

    pub fn done(&self) -> Option<TerminationReason> {
        self.done
    }

    /// Facts the termination rules saw on the last step.
    pub fn last_snapshot(&self) -> &TermSnapshot {
        &self.last_snapshot
    }

    /// Goal target of the episode (golf hole, kick target, racket target,
    /// hoop, finish or jump goal).
    pub fn target(&self) -> Vec3 {
        self.tracker.target
    }

    /// Curriculum level drawn for this episode, if the sport has one.
    pub fn level(&self) -> Option<f64> {
        self.tracker.level
    }

    pub fn hurdle_tops(&self) -> &[Vec3] {
        &self.hurdle_tops
    }

    /// Starts the next episode of this stream.
    pub fn reset(&mut self) -> Result<()> {
        self.reset_episode(self.episode + 1)
    }

    /// Resets to episode `episode` of this stream. Spawns depend only on
    /// (seed, stream, episode).
    pub fn reset_episode(&mut self, episode: u64) -> Result<()> {
        self.episode = episode;
        self.rng = episode_rng(self.seed, self.stream, episode, 0);
        let mut cur_rng = episode_rng(self.seed ^ self.cfg.curriculum.seed, self.stream, episode, 1);
        self.steps = 0;
        self.tracker = Tracker::default();
        self.match_state = MatchState::default();
        self.done = None;
        self.last_snapshot = TermSnapshot::default();
        for r in self.rewards.iter_mut() {
            *r = RewardBreakdown::zero();
        }
        for r in self.returns.iter_mut() {
            *r = 0.0;
        }
        self.world.time = 0.0;
        for o in &mut self.world.objects {
            o.held = None;
            o.frozen = false;
        }
        match self.cfg.sport {
            Sport::HighJump => {
                let c = self.cfg.arena.track.bar_center;
                let nominal = 1.0;
                let h = self.cfg.curriculum.sample(&mut cur_rng, nominal);
                self.world.scene.bars[0].top = h;
                self.tracker.level = Some(h);
                self.tracker.target = Vec3::from(self.cfg.arena.track.high_jump_goal);
                let _ = c;
                self.spawn_agent(0, 0.0, 0.0, 0.0)?;
            }
            Sport::LongJump => {
                self.tracker.target = Vec3::from(self.cfg.arena.track.long_jump_goal);
                self.spawn_agent(0, 0.0, 0.0, 0.0)?;
            }
            Sport::Hurdling => {
                let t = &self.cfg.arena.track;
                let mut max_h: f64 = 0.0;
                for (k, x) in t.hurdle_positions().enumerate() {
                    let h = self.cfg.curriculum.sample(&mut cur_rng, t.hurdle_height);
                    self.world.scene.bars[k].top = h;
                    self.hurdle_tops[k] = Vec3::new(x, 0.0, h);
                    max_h = max_h.max(h);
                }
                self.tracker.level = Some(max_h);
                self.tracker.target = Vec3::new(t.finish, 0.0, 0.0);
                self.spawn_agent(0, 0.0, 0.0, 0.0)?;
            }
            Sport::Golf => self.reset_golf()?,
            Sport::Javelin => {
                self.spawn_agent(0, 0.0, 0.0, 0.0)?;
                let hand = self.hand(0);
                self.world.objects[0].kin = ObjectKinematics {
                    orient: javelin_default_orient(0.0),
                    ..ObjectKinematics::at(hand)
                };
                self.world.attach(0, 0);
                let root = self.world.agents[0].state().root_pos();
                self.tracker.target = root + Vec3::new(self.cfg.arena.javelin.field_half_width, 0.0, 0.0);
            }
            Sport::Tennis | Sport::TableTennis => {
                let (x, target) = if self.cfg.sport == Sport::Tennis {
                    let t = &self.cfg.arena.tennis;
                    (-t.court[0] / 2.0 - 0.5, Vec3::new(t.court[0] / 4.0, 0.0, 0.0))
                } else {
                    let t = &self.cfg.arena.table_tennis;
                    (-t.table[0] / 2.0 - 0.6, Vec3::new(t.table[0] / 4.0, 0.0, t.table[2]))
                };
                self.tracker.target = target;
                self.spawn_agent(0, x, 0.0, 0.0)?;
                let kin = self.launch();
                self.world.objects[0].kin = kin;
            }
            Sport::Fencing | Sport::Boxing => {
                let gap = if self.cfg.sport == Sport::Fencing {
                    self.cfg.arena.combat.fencing_gap
                } else {
                    self.cfg.arena.combat.boxing_gap
                };
                self.spawn_agent(0, -gap / 2.0, 0.0, 0.0)?;
                self.spawn_agent(1, gap / 2.0, 0.0, PI)?;
            }
            Sport::PenaltyKick => {
                let s = &self.cfg.arena.soccer;
                let goal_x = s.field[0] / 2.0;
                let (gw, gh, r) = (s.goal[0], s.goal[1], s.ball_radius);
                let (agent_x, ball_x) = (goal_x - s.agent_from_goal, goal_x - s.ball_from_goal);
                let ty = self.rng.random_range(-gw / 2.0..=gw / 2.0);
                let tz = self.rng.random_range(0.0..=gh);
                self.tracker.target = Vec3::new(goal_x, ty, tz);
                self.spawn_agent(0, agent_x, 0.0, 0.0)?;
                self.world.objects[0].kin = ObjectKinematics::at(Vec3::new(ball_x, 0.0, r));
                self.tracker.ball_spawn = self.world.objects[0].kin.pos;
            }
            Sport::SoccerMatch => {
                let n = self.cfg.arena.soccer.team_size;
                for k in 0..n {
                    let y = if k == 0 { 0.0 } else { 3.0 * (k as f64 - (n as f64) / 2.0) };
                    let x = 3.0 + 2.0 * k as f64;
                    self.spawn_agent(k, -x, y, 0.0)?;
                    self.spawn_agent(n + k, x, -y, PI)?;
                }
                self.center_ball();
                self.tracker.target = Vec3::new(self.cfg.arena.soccer.field[0] / 2.0, 0.0, 0.0);
            }
            Sport::FreeThrow => {
                let b = &self.cfg.arena.basketball;
                let hoop = Vec3::new(b.free_throw_distance, 0.0, b.hoop_height);
                let r = b.ball_radius;
                self.tracker.target = hoop;
                self.spawn_agent(0, 0.0, 0.0, 0.0)?;
                let hand = self.hand(0);
                self.world.objects[0].kin = ObjectKinematics::at(hand + Vec3::new(0.0, 0.0, r + 0.01));
                self.world.attach(0, 0);
            }
        }
        let s = self.world.agents[0].state().root_pos();
        self.tracker.spawn_root = s;
        self.tracker.max_root_x = s.x;
        self.tracker.max_root_z = s.z;
        if let Some(o) = self.world.objects.first() {
            if self.tracker.ball_spawn == Vec3::zeros() {
                self.tracker.ball_spawn = o.kin.pos;
            }
        }
        Ok(())
    }

    fn spawn_agent(&mut self, i: usize, x: f64, y: f64, yaw: f64) -> Result<()> {
        let z = self.world.scene.ground_height(x, y) + self.cfg.proxy.stand_height;
        self.scratch.set_rest_pose(&self.skeleton, Vec3::new(x, y, z), yaw);
        self.world.reset_agent(i, &self.scratch)
    }

    fn hand(&self, agent: usize) -> Vec3 {
        self.world.agents[agent].state().joint_pos[self.skeleton.end_effectors.right_hand]
    }

    fn center_ball(&mut self) {
        let r = self.cfg.arena.soccer.ball_radius;
        let o = &mut self.world.objects[0];
        o.kin = ObjectKinematics::at(Vec3::new(0.0, 0.0, r));
        self.tracker.ball_spawn = o.kin.pos;
    }

    fn reset_golf(&mut self) -> Result<()> {
        let g = self.cfg.arena.golf.clone();
        // Flat until the terrain is placed; the tee and the stance both end
        // up on zero-height lines of the saddle.
        self.world.scene.terrain = None;
        self.spawn_agent(0, 0.0, 0.0, -FRAC_PI_2)?;
        let st = self.world.agents[0].state();
        let club = self.world.agents[0].implements[0].pose(st).center;
        let left = rotate_z(&Vec3::y(), -FRAC_PI_2);
        let [_, hy, _] = match self.world.agents[0].implements[0].shape {
            ImplementShape::Box { half_extents } => half_extents,
            _ => [0.0; 3],
        };
        let r = g.ball_radius;
        let tee = club + left * (hy + r + 0.005);
        let tee = Vec3::new(tee.x, tee.y, r);
        let root = st.root_pos();
        let quarter = self.rng.random_range(0..4u32) as f64;
        let sign = if self.rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let mut terrain = WaveTerrain::new(g.amplitude, g.wavelength, 0.0, sign * FRAC_PI_2);
        terrain.origin = tee.xy();
        terrain.yaw = (root.y - tee.y).atan2(root.x - tee.x) + quarter * FRAC_PI_2;
        self.world.scene.terrain = Some((terrain, Material::default()));
        self.world.objects[0].kin = ObjectKinematics::at(tee);
        let d = self.rng.random_range(g.target_range[0]..=g.target_range[1]);
        let tx = tee.x + d;
        self.tracker.target = Vec3::new(tx, tee.y, terrain.height(tx, tee.y));
        self.tracker.ball_spawn = tee;
        Ok(())
    }

    /// Launch kinematics for the next incoming racket-sport ball.
    fn launch(&mut self) -> ObjectKinematics {
        let (len, wid, plane, net_top, launch_x, speeds, launch_z, r) = if self.cfg.sport == Sport::Tennis {
            let t = &self.cfg.arena.tennis;
            (t.court[0], t.court[1], 0.0, t.net_height, t.court[0] / 2.0 + 1.0, t.launch_speed, t.launch_height, t.ball_radius)
        } else {
            let t = &self.cfg.arena.table_tennis;
            (
                t.table[0],
                t.table[1],
                t.table[2],
                t.table[2] + t.net_height,
                t.table[0] / 2.0 + 0.3,
                t.launch_speed,
                t.launch_height,
                t.ball_radius,
            )
        };
        let h = plane + r;
        let p0y = self.rng.random_range(-wid / 4.0..=wid / 4.0);
        let p0 = Vec3::new(launch_x, p0y, launch_z.max(h));
        let clears = |v: &Vec3| {
            let t = -p0.x / v.x;
            t > 0.0 && p0.z + v.z * t - 0.5 * GRAVITY * t * t > net_top + r + 0.02
        };
        let mut land = Vec2::new(-len / 4.0, 0.0);
        for _ in 0..32 {
            land = Vec2::new(
                self.rng.random_range(-len / 2.0..-0.05 * len),
                self.rng.random_range(-wid / 2.0 + r..=wid / 2.0 - r),
            );
            let speed = self.rng.random_range(speeds[0]..=speeds[1]);
            if let Some(v) = launch_to_land(&p0, &land, h, speed, GRAVITY) {
                if clears(&v) {
                    return ObjectKinematics::with_velocity(p0, v);
                }
            }
        }
        // Lob: a fixed, generous flight time always clears the net.
        let t = 1.5;
        let d = land - p0.xy();
        let v = Vec3::new(d.x / t, d.y / t, (h - p0.z + 0.5 * GRAVITY * t * t) / t);
        ObjectKinematics::with_velocity(p0, v)
    }

    /// Writes every agent's observation, agent-major, into `out`
    /// (`agent_count × obs_dim` values).
    pub fn write_obs(&mut self, out: &mut [f32]) -> Result<()> {
        let od = self.obs_dim;
        if out.len() != od * self.agent_count() {
            return Err(Error::Config(format!(
                "observation buffer has {} slots, need {}",
                out.len(),
                od * self.agent_count()
            )));
        }
        for a in 0..self.agent_count() {
            self.assemble(a)?;
            for (o, v) in out[a * od..(a + 1) * od].iter_mut().zip(&self.obs64) {
                *o = *v as f32;
            }
        }
        Ok(())
    }

    /// Full f64 observation of agent `a`.
    pub fn observe(&mut self, a: usize) -> Result<&[f64]> {
        self.assemble(a)?;
        Ok(&self.obs64)
    }

    fn assemble(&mut self, a: usize) -> Result<()> {
        let pl = BodyState::flat_len(self.skeleton.joint_count);
        let (pro, goal_out) = self.obs64.split_at_mut(pl);
        let frame = write_proprio(self.world.agents[a].state(), &mut self.scratch, pro)?;
        let goal = sport_goal(&self.cfg, &self.world, &self.tracker, &self.arena, &self.hurdle_tops, self.steps, a)?;
        goal.write(&frame, goal_out)
    }

    /// Advances one control step with `actions` (all agents concatenated).
    pub fn step(&mut self, actions: &[f32]) -> Result<StepOutcome> {
        if self.done.is_some() {
            return Err(Error::InvalidState("episode finished; reset before stepping".into()));
        }
        let need = self.world.action_len();
        if actions.len() != need {
            return Err(Error::InvalidAction(format!("expected {need} action values, got {}", actions.len())));
        }
        let mut prev_roots: ArrayVec<Vec3, MAX_AGENTS> = ArrayVec::new();
        for a in &self.world.agents {
            prev_roots.push(a.state().root_pos());
        }
        let prev_obj = self.world.objects.first().map(|o| o.kin.pos).unwrap_or_default();
        let fault = match control_step(&mut self.world, actions) {
            Ok(()) => false,
            Err(Error::Blowup(_)) => true,
            Err(e) => return Err(e),
        };
        self.steps += 1;
        self.match_state.begin_step();
        let mut snap = TermSnapshot {
            steps: self.steps,
            fault,
            ..Default::default()
        };
        if fault {
            for r in self.rewards.iter_mut() {
                *r = RewardBreakdown::zero();
            }
        } else {
            let pending = self.advance_sport(&prev_roots, prev_obj, &mut snap);
            for (ret, r) in self.returns.iter_mut().zip(&self.rewards) {
                *ret += r.total();
            }
            match pending {
                Pending::Nothing => {}
                Pending::Relaunch => {
                    let kin = self.launch();
                    self.world.objects[0].kin = kin;
                    self.world.agents[0].contacts.rearm(ContactPair::RacketBall);
                    self.tracker.returned = false;
                    self.tracker.own_bounces = 0;
                }
                Pending::CenterBall => self.center_ball(),
            }
        }
        self.last_snapshot = snap;
        self.done = check_termination(&self.cfg, &snap);
        Ok(StepOutcome {
            done: self.done.is_some(),
            reason: self.done,
        })
    }

    fn root(&self, a: usize) -> Vec3 {
        self.world.agents[a].state().root_pos()
    }

    fn fallen_any(&self) -> bool {
        (0..self.agent_count()).any(|a| self.world.fallen(a))
    }

    fn advance_sport(&mut self, prev_roots: &[Vec3], prev_obj: Vec3, snap: &mut TermSnapshot) -> Pending {
        snap.fallen = self.fallen_any();
        let root = self.root(0);
        let prev_root = prev_roots[0];
        self.tracker.max_root_x = self.tracker.max_root_x.max(root.x);
        self.tracker.max_root_z = self.tracker.max_root_z.max(root.z);
        let w = self.cfg.weights;
        match self.cfg.sport {
            Sport::HighJump => {
                let t = &self.cfg.arena.track;
                let bar = self.world.scene.bars[0];
                snap.bar_contact = self.world.agents[0].contacts.flag(ContactPair::BodyBar);
                let in_span = |p: &Vec3| p.y >= bar.y_min && p.y <= bar.y_max;
                let (lo, hi) = (bar.x - 0.5, bar.x + 0.5);
                if root.x >= lo && root.x <= hi && in_span(&root) {
                    self.tracker.window_max_z = self.tracker.window_max_z.max(root.z);
                }
                if prev_root.x < hi
                    && root.x >= hi
                    && !self.tracker.bar_cleared
                    && !self.tracker.bar_failed
                    && in_span(&root)
                {
                    if self.tracker.window_max_z >= bar.top {
                        self.tracker.bar_cleared = true;
                    } else {
                        self.tracker.bar_failed = true;
                    }
                }
                snap.bar_not_cleared = self.tracker.bar_failed;
                let crossed_outside = prev_root.x < bar.x && root.x >= bar.x && !in_span(&root);
                let y_lo = -t.runway_half_width;
                let y_hi = t.bar_center[1] + t.bar_width / 2.0 + t.runway_half_width;
                snap.off_track = crossed_outside
                    || root.x < -TRACK_MARGIN
                    || root.x > bar.x + TRACK_MARGIN
                    || root.y < y_lo
                    || root.y > y_hi;
                snap.task_complete = self.tracker.bar_cleared;
                self.rewards[0] = reward_high_jump(
                    &HighJumpInput {
                        prev_root,
                        root,
                        goal: self.tracker.target,
                    },
                    &w.high_jump,
                );
            }
            Sport::LongJump => {
                let line = self.cfg.arena.track.long_jump_line;
                let stand = self.cfg.proxy.stand_height;
                let vz = self.world.agents[0].state().root_vel().z;
                let airborne = root.z > stand + 1e-6 || vz > 0.0;
                // A landing and a fresh takeoff can share one control step.
                let bounced = self.tracker.was_airborne && self.tracker.prev_vz < 0.0 && vz > 0.0;
                let landed = self.tracker.was_airborne && (!airborne || bounced);
                let mut foul = false;
                if landed && root.x > line && self.tracker.takeoff_x <= line && self.tracker.landing_x.is_none() {
                    self.tracker.landing_x = Some(root.x);
                }
                if airborne && (!self.tracker.was_airborne || bounced) && self.tracker.landing_x.is_none() {
                    self.tracker.takeoff_x = prev_root.x;
                    foul = prev_root.x > line;
                }
                if !airborne && !self.tracker.was_airborne && root.x > line {
                    foul = true;
                }
                self.tracker.prev_vz = vz;
                self.tracker.was_airborne = airborne;
                snap.off_track = foul || root.y.abs() > self.cfg.arena.track.runway_half_width || root.x < -TRACK_MARGIN;
                snap.task_complete = self.tracker.landing_x.is_some();
                self.rewards[0] = reward_long_jump(
                    &LongJumpInput {
                        prev_root,
                        root,
                        root_vel: self.world.agents[0].state().root_vel(),
                        goal: self.tracker.target,
                        jump_line_x: line,
                    },
                    &w.long_jump,
                );
            }
            Sport::Hurdling => {
                let t = &self.cfg.arena.track;
                snap.fallen |= self.world.agents[0].contacts.flag(ContactPair::BodyHurdle);
                snap.off_track = root.y.abs() > t.lane_width / 2.0 || root.x < -TRACK_MARGIN;
                snap.task_complete = root.x >= t.finish;
                self.rewards[0] = reward_hurdling(
                    &HurdlingInput {
                        prev_root,
                        root,
                        finish: self.tracker.target,
                    },
                    w.hurdling,
                );
            }
            Sport::Golf => {
                let g = &self.cfg.arena.golf;
                let latched = self.world.agents[0].contacts.flag(ContactPair::ClubBall);
                let ball = self.world.objects[0].kin;
                if latched && self.tracker.contact_step.is_none() {
                    self.tracker.contact_step = Some(self.steps);
                    self.tracker.ball_at_contact = prev_obj;
                }
                let spawn = self.tracker.ball_spawn;
                let dir = (self.tracker.target - spawn).xy().try_normalize(1e-9).unwrap_or_else(Vec2::x);
                snap.contact_latched = latched;
                snap.ball_body_distance = (ball.pos - root).xy().norm();
                snap.ball_progress = (ball.pos - self.tracker.ball_at_contact).xy().dot(&dir);
                let rel = ball.pos - spawn;
                snap.out_of_bounds =
                    rel.x < g.bounds[0] || rel.y < g.bounds[1] || rel.x > g.bounds[2] || rel.y > g.bounds[3];
                snap.task_complete = self
                    .tracker
                    .contact_step
                    .is_some_and(|s| self.steps > s + 3 && ball.speed() < REST_SPEED);
                let st = self.world.agents[0].state();
                let club = self.world.agents[0].implements[0].pose(st).center;
                self.rewards[0] = reward_golf(
                    &GolfInput {
                        prev_ball: prev_obj,
                        ball: ball.pos,
                        ball_vel: ball.lin_vel,
                        club,
                        target: self.tracker.target,
                        contact_latched: latched,
                    },
                    &w.golf,
                );
            }
            Sport::Javelin => {
                let jav = self.world.objects[0].clone();
                let hand = self.hand(0);
                if jav.held.is_none() {
                    self.tracker.released = true;
                }
                if jav.frozen && self.tracker.landed_at.is_none() {
                    self.tracker.landed_at = Some(jav.kin.pos);
                }
                let stage = javelin_stage(elapsed(self.steps), w.javelin.stage_times);
                // Letting go during the hold stage counts as detaching.
                snap.javelin_hand_distance = if stage == 0 && jav.held.is_none() {
                    f64::INFINITY
                } else {
                    (jav.kin.pos - hand).norm()
                };
                snap.javelin_pose_error = javelin_pose_error(&jav.kin.orient, 0.0);
                snap.task_complete = self.tracker.landed_at.is_some();
                let r = reward_javelin(
                    &JavelinInput {
                        t: elapsed(self.steps),
                        hand,
                        javelin_pos: jav.kin.pos,
                        prev_javelin_pos: prev_obj,
                        javelin_orient: jav.kin.orient,
                        root,
                        spawn_root: self.tracker.spawn_root,
                        throw_yaw: 0.0,
                    },
                    &w.javelin,
                );
                self.rewards[0] = r.unwrap_or_else(|_| RewardBreakdown::zero());
            }
            Sport::Tennis | Sport::TableTennis => return self.advance_rally(root, snap),
            Sport::Fencing | Sport::Boxing => self.advance_combat(snap),
            Sport::PenaltyKick => {
                let s = &self.cfg.arena.soccer;
                let ball = self.world.objects[0].kin;
                let field = self.arena;
                let goal_x = s.field[0] / 2.0;
                match goal_crossing(&prev_obj, &ball.pos, goal_x, 1.0, s) {
                    Some((p, inside)) => {
                        let t = self.tracker.target;
                        self.tracker.crossing_error.get_or_insert(((p.y - t.y).powi(2) + (p.z - t.z).powi(2)).sqrt());
                        if inside {
                            self.tracker.scored = true;
                        } else {
                            self.tracker.ball_out = true;
                        }
                    }
                    None => {
                        if !field.contains(&ball.pos) && !self.tracker.scored {
                            self.tracker.ball_out = true;
                        }
                    }
                }
                snap.point_scored = self.tracker.scored;
                snap.out_of_bounds = self.tracker.ball_out || !field.contains(&root);
                if self.tracker.scored {
                    self.match_state.award(0);
                }
                self.rewards[0] = reward_penalty_kick(
                    &PenaltyKickInput {
                        prev_root,
                        root,
                        prev_ball: prev_obj,
                        ball: ball.pos,
                        ball_vel: ball.lin_vel,
                        target: self.tracker.target,
                        ball_spawn_x: self.tracker.ball_spawn.x,
                    },
                    &w.penalty_kick,
                );
            }
            Sport::SoccerMatch => return self.advance_match(prev_roots, prev_obj, snap),
            Sport::FreeThrow => {
                let b = &self.cfg.arena.basketball;
                let ball = self.world.objects[0].clone();
                let hoop = self.tracker.target;
                if ball.held.is_none() {
                    self.tracker.released = true;
                }
                let mut basket = false;
                if self.tracker.released && prev_obj.z >= hoop.z && ball.kin.pos.z < hoop.z {
                    let s = (prev_obj.z - hoop.z) / (prev_obj.z - ball.kin.pos.z);
                    let p = prev_obj + (ball.kin.pos - prev_obj) * s;
                    let err = (p - hoop).xy().norm();
                    if self.tracker.crossing_error.is_none() {
                        self.tracker.crossing_error = Some(err);
                    }
                    if err < b.rim_radius - b.ball_radius && !self.tracker.scored {
                        basket = true;
                        self.tracker.scored = true;
                        self.match_state.award(0);
                    }
                }
                if self.tracker.released
                    && !self.tracker.scored
                    && self.world.events.objects.iter().any(|e| e.object == 0 && e.surface == SurfaceId::Ground)
                {
                    self.tracker.lost = true;
                }
                snap.point_scored = self.tracker.scored;
                snap.lost_point = self.tracker.lost;
                snap.out_of_bounds = !self.arena.contains(&root);
                self.rewards[0] = reward_free_throw(
                    &FreeThrowInput {
                        ball: ball.kin.pos,
                        ball_vel: ball.kin.lin_vel,
                        hoop,
                        basket,
                    },
                    &w.free_throw,
                )
                .unwrap_or_else(|_| RewardBreakdown::zero());
            }
        }
        Pending::Nothing
    }

    fn advance_rally(&mut self, root: Vec3, snap: &mut TermSnapshot) -> Pending {
        let tennis = self.cfg.sport == Sport::Tennis;
        let (len, wid, bounce_surface) = if tennis {
            (self.cfg.arena.tennis.court[0], self.cfg.arena.tennis.court[1], SurfaceId::Ground)
        } else {
            let t = &self.cfg.arena.table_tennis;
            (t.table[0], t.table[1], SurfaceId::Table)
        };
        if self
            .world
            .events
            .hits
            .iter()
            .any(|h| h.agent == 0 && h.pair == ContactPair::RacketBall)
        {
            self.tracker.returned = true;
        }
        let mut pending = Pending::Nothing;
        for ev in self.world.events.objects.iter().filter(|e| e.object == 0) {
            if self.tracker.lost || pending == Pending::Relaunch {
                break;
            }
            let p = ev.point;
            if !self.tracker.returned {
                if ev.surface == bounce_surface && p.x < 0.0 && self.tracker.own_bounces == 0 {
                    self.tracker.own_bounces = 1;
                } else {
                    self.tracker.lost = true;
                }
            } else {
                let inside = p.x > 0.0 && p.x <= len / 2.0 && p.y.abs() <= wid / 2.0;
                if ev.surface == bounce_surface && inside {
                    self.match_state.n_hit += 1;
                    let t = self.tracker.target;
                    self.tracker.error_sum += ((p.x - t.x).powi(2) + (p.y - t.y).powi(2)).sqrt();
                    self.tracker.error_count += 1;
                    pending = Pending::Relaunch;
                } else {
                    self.tracker.lost = true;
                }
            }
        }
        if self.tracker.lost {
            pending = Pending::Nothing;
        }
        let runoff = if tennis { self.cfg.arena.tennis.runoff } else { self.cfg.arena.table_tennis.runoff };
        snap.out_of_bounds = root.x > 0.0 || root.x < -len / 2.0 - runoff || root.y.abs() > wid / 2.0 + runoff;
        snap.lost_point = self.tracker.lost;
        let ball = self.world.objects[0].kin;
        let st = self.world.agents[0].state();
        let racket = self.world.agents[0].implements[0].pose(st).center;
        self.rewards[0] = reward_racket(
            &RacketInput {
                racket,
                ball: ball.pos,
                ball_vel: ball.lin_vel,
                target: self.tracker.target,
                contact_latched: self.world.agents[0].contacts.flag(ContactPair::RacketBall),
                n_hits: self.match_state.n_hit,
                sport: if tennis { RacketSport::Tennis } else { RacketSport::TableTennis },
            },
            &self.cfg.weights.racket,
        );
        pending
    }

    fn advance_combat(&mut self, snap: &mut TermSnapshot) {
        let w = self.cfg.weights.combat;
        let mut scored = [false; 2];
        for ev in &self.world.events.strikes {
            let targets = self.target_positions(ev.defender);
            let (tip, _) = self.best_tip(ev.attacker, &targets);
            let d = min_target_distance(&tip, &targets);
            if point_condition(d, ev.force, &w) {
                scored[ev.attacker] = true;
            }
        }
        for (side, s) in scored.iter().enumerate() {
            if *s {
                self.match_state.award(side);
            }
        }
        snap.point_scored = scored[0] || scored[1];
        snap.out_of_bounds = (0..2).any(|a| !self.arena.contains(&self.root(a)));
        for a in 0..2 {
            let o = 1 - a;
            let st = self.world.agents[a].state();
            let targets = self.target_positions(o);
            let (tip, _) = self.best_tip(a, &targets);
            self.rewards[a] = reward_combat(
                &CombatInput {
                    root: st.root_pos(),
                    root_vel: st.root_vel(),
                    yaw: yaw_of(st).unwrap_or(0.0),
                    opp_root: self.root(o),
                    tip,
                    targets,
                    point: scored[a],
                },
                &w,
            );
        }
    }

    fn target_positions(&self, agent: usize) -> [Vec3; 5] {
        let st = self.world.agents[agent].state();
        self.skeleton.target_bodies.map(|j| st.joint_pos[j])
    }

    /// Implement tip of `agent` closest to `targets`, with its index.
    fn best_tip(&self, agent: usize, targets: &[Vec3; 5]) -> (Vec3, usize) {
        let a = &self.world.agents[agent];
        let mut best = (a.state().joint_pos[self.skeleton.end_effectors.right_hand], 0, f64::INFINITY);
        for (k, imp) in a.implements.iter().enumerate() {
            let tip = imp.tip(&imp.pose(a.state()));
            let d = min_target_distance(&tip, targets);
            if d < best.2 {
                best = (tip, k, d);
            }
        }
        (best.0, best.1)
    }

    fn advance_match(&mut self, prev_roots: &[Vec3], prev_obj: Vec3, snap: &mut TermSnapshot) -> Pending {
        let s = self.cfg.arena.soccer.clone();
        let n = s.team_size;
        let goal_x = s.field[0] / 2.0;
        let ball = self.world.objects[0].kin;
        let mut pending = Pending::Nothing;
        let mut scored_side = None;
        for (dir, side) in [(1.0, 0usize), (-1.0, 1usize)] {
            if let Some((_, inside)) = goal_crossing(&prev_obj, &ball.pos, goal_x, dir, &s) {
                if inside {
                    scored_side = Some(side);
                }
                pending = Pending::CenterBall;
            }
        }
        if pending == Pending::Nothing && !self.arena.contains(&ball.pos) {
            pending = Pending::CenterBall;
        }
        if let Some(side) = scored_side {
            self.match_state.award(side);
        }
        snap.out_of_bounds = (0..2 * n).any(|a| !self.arena.contains(&self.root(a)));
        for a in 0..2 * n {
            let side = a / n;
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let scored = match scored_side {
                Some(s) if s == side => 1,
                Some(_) => -1,
                None => 0,
            };
            let st = self.world.agents[a].state();
            self.rewards[a] = reward_soccer_match(
                &SoccerMatchInput {
                    prev_root: prev_roots[a],
                    root: st.root_pos(),
                    prev_ball: prev_obj,
                    ball: ball.pos,
                    ball_vel: ball.lin_vel,
                    target: Vec3::new(sign * goal_x, 0.0, 0.0),
                    scored,
                },
                &self.cfg.weights.soccer_match,
            );
        }
        pending
    }

    /// Summary of the finished episode; `None` while it is running.
    pub fn summary(&self) -> Option<EpisodeSummary> {
        let reason = self.done?;
        let t = &self.tracker;
        let sport = self.cfg.sport;
        let time = elapsed(self.steps);
        let mut s = EpisodeSummary {
            sport,
            stream: self.stream,
            episode: self.episode,
            steps: self.steps,
            reason,
            success: false,
            distance: None,
            hits: None,
            error_distance: None,
            hit: None,
            time,
            returns: self.returns.clone(),
            score: self.match_state.score,
            level: t.level,
        };
        let obj = self.world.objects.first().map(|o| o.kin.pos).unwrap_or_default();
        match sport {
            Sport::HighJump => {
                // Reported as the peak root height.
                s.success = reason == TerminationReason::TaskComplete;
                s.distance = Some(t.max_root_z);
            }
            Sport::LongJump => {
                s.success = reason == TerminationReason::TaskComplete;
                s.distance = Some(t.landing_x.map_or(0.0, |x| x - self.cfg.arena.track.long_jump_line));
            }
            Sport::Hurdling => {
                s.success = reason == TerminationReason::TaskComplete;
                s.distance = Some(self.root(0).x - t.spawn_root.x);
            }
            Sport::Golf => {
                let hit = t.contact_step.is_some();
                s.hit = Some(hit);
                s.success = reason == TerminationReason::TaskComplete;
                s.distance = Some(if hit { (obj - t.ball_spawn).xy().norm() } else { 0.0 });
                if hit {
                    s.error_distance = Some((obj - t.target).xy().norm());
                }
            }
            Sport::Javelin => {
                let d = t.landed_at.map_or(0.0, |p| (p.x - t.spawn_root.x).max(0.0));
                s.success = reason == TerminationReason::TaskComplete && d > 0.0;
                s.distance = Some(d);
            }
            Sport::Tennis | Sport::TableTennis => {
                s.hits = Some(self.match_state.n_hit);
                s.success = self.match_state.n_hit > 0;
                if t.error_count > 0 {
                    s.error_distance = Some(t.error_sum / t.error_count as f64);
                }
            }
            Sport::Fencing | Sport::Boxing | Sport::SoccerMatch => {
                s.success = self.match_state.score[0] > self.match_state.score[1];
                s.hits = Some(self.match_state.points_won[0]);
            }
            Sport::PenaltyKick => {
                s.success = t.scored;
                s.distance = Some((obj - t.ball_spawn).xy().norm());
                s.error_distance = t.crossing_error;
            }
            Sport::FreeThrow => {
                s.success = t.scored;
                s.error_distance = t.crossing_error;
            }
        }
        Some(s)
    }
}

/// Where the ball centre crossed the plane one radius past the goal line
/// at `dir · goal_x`, and whether that point lies inside the goal mouth.
fn goal_crossing(prev: &Vec3, cur: &Vec3, goal_x: f64, dir: f64, s: &super::config::SoccerArena) -> Option<(Vec3, bool)> {
    let plane = dir * (goal_x + s.ball_radius);
    let (a, b) = (dir * prev.x, dir * cur.x);
    if !(a < dir * plane && b >= dir * plane) {
        return None;
    }
    let f = (plane - prev.x) / (cur.x - prev.x);
    let p = prev + (cur - prev) * f;
    let inside = p.y.abs() <= s.goal[0] / 2.0 - s.ball_radius && p.z <= s.goal[1] - s.ball_radius;
    Some((p, inside))
}

fn sport_goal<'a>(
    cfg: &SportConfig,
    world: &'a World,
    tracker: &Tracker,
    arena: &ArenaFrame,
    hurdles: &'a [Vec3],
    steps: u32,
    a: usize,
) -> Result<SportGoal<'a>> {
    let ball = || {
        world
            .objects
            .first()
            .map(|o| o.kin)
            .ok_or_else(|| Error::Config(format!("{} needs a ball", cfg.sport)))
    };
    let st = world.agents[a].state();
    Ok(match cfg.sport {
        Sport::HighJump => {
            let bar = world.scene.bars[0];
            SportGoal::HighJump {
                goal: tracker.target,
                bar: Vec3::new(bar.x, 0.5 * (bar.y_min + bar.y_max), bar.top),
            }
        }
        Sport::LongJump => {
            let r = st.root_pos();
            SportGoal::LongJump {
                goal: tracker.target,
                line_point: Vec3::new(cfg.arena.track.long_jump_line, r.y, 0.0),
                root_vel: st.root_vel(),
            }
        }
        Sport::Hurdling => SportGoal::Hurdling {
            finish: tracker.target,
            hurdles,
        },
        Sport::Golf => {
            let (terrain, _) = world
                .scene
                .terrain
                .as_ref()
                .ok_or_else(|| Error::Config("golf needs terrain".into()))?;
            SportGoal::Golf {
                ball: ball()?,
                target: tracker.target,
                terrain,
                spacing: cfg.arena.golf.patch_spacing,
            }
        }
        Sport::Javelin => SportGoal::Javelin {
            javelin: ball()?,
            elapsed: elapsed(steps),
            throw_yaw: 0.0,
            held: world.objects[0].held.is_some(),
        },
        Sport::Tennis | Sport::TableTennis => SportGoal::Racket {
            ball: ball()?,
            target: tracker.target,
            racket: world.agents[a].implements[0].pose(st).center,
        },
        Sport::Fencing | Sport::Boxing => {
            let o = 1 - a;
            let opp = world.agents[o].state();
            let targets = world.agents[o].backend.skeleton().target_bodies;
            let mut best = (st.root_pos(), f64::INFINITY);
            let tpos = targets.map(|j| opp.joint_pos[j]);
            for imp in &world.agents[a].implements {
                let tip = imp.tip(&imp.pose(st));
                let d = min_target_distance(&tip, &tpos);
                if d < best.1 {
                    best = (tip, d);
                }
            }
            SportGoal::Combat {
                opponent: opp,
                targets,
                tip: best.0,
                own_contacts: &world.agents[a].contacts,
                opp_contacts: &world.agents[o].contacts,
                force_scale: world.config.body_mass * GRAVITY,
                arena: (cfg.sport == Sport::Fencing).then_some(*arena),
            }
        }
        Sport::PenaltyKick => {
            let s = &cfg.arena.soccer;
            let gx = s.field[0] / 2.0;
            SportGoal::PenaltyKick {
                ball: ball()?,
                posts: [Vec3::new(gx, -s.goal[0] / 2.0, 0.0), Vec3::new(gx, s.goal[0] / 2.0, 0.0)],
                target: tracker.target,
            }
        }
        Sport::SoccerMatch => {
            let n = cfg.arena.soccer.team_size;
            let side = a / n;
            let gx = cfg.arena.soccer.field[0] / 2.0;
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let mut others = ArrayVec::new();
            let team = side * n..side * n + n;
            let rest = (0..2 * n).filter(|k| !team.contains(k));
            for k in team.clone().filter(|k| *k != a).chain(rest) {
                let s = world.agents[k].state();
                others.push((s.root_pos(), s.root_vel()));
            }
            SportGoal::SoccerMatch {
                ball: ball()?,
                others,
                attack_goal: Vec3::new(sign * gx, 0.0, 0.0),
                defend_goal: Vec3::new(-sign * gx, 0.0, 0.0),
            }
        }
        Sport::FreeThrow => SportGoal::FreeThrow {
            ball: ball()?,
            hoop: tracker.target,
            hand: st.joint_pos[world.agents[a].backend.skeleton().end_effectors.right_hand],
        },
    })
}

fn humanoid(cfg: &SportConfig, skeleton: &SkeletonSpec) -> Result<Box<dyn DynamicsBackend>> {
    Ok(Box::new(ProxyHumanoid::new(skeleton.clone(), cfg.proxy)?))
}

fn build_world(cfg: &SportConfig, sk: &SkeletonSpec) -> Result<(World, ArenaFrame)> {
    let a = &cfg.arena;
    let hand = sk.end_effectors.right_hand;
    let feet = [sk.end_effectors.left_foot, sk.end_effectors.right_foot];
    let mut arena = ArenaFrame::centered(1.0e4, 1.0e4);
    let world = match cfg.sport {
        Sport::HighJump => {
            let t = &a.track;
            let mut scene = flat_scene();
            scene.bars.push(Bar {
                x: t.bar_center[0],
                y_min: t.bar_center[1] - t.bar_width / 2.0,
                y_max: t.bar_center[1] + t.bar_width / 2.0,
                top: 1.0,
                thickness: t.bar_thickness,
                hurdle: false,
            });
            let mut w = World::new(scene, cfg.world);
            w.add_agent(humanoid(cfg, sk)?, vec![])?;
            w.add_interaction(Interaction::Bars { agent: 0 })?;
            w
        }
        Sport::LongJump => {
            let mut w = World::new(flat_scene(), cfg.world);
            w.add_agent(humanoid(cfg, sk)?, vec![])?;
            w
        }
        Sport::Hurdling => {
            let t = &a.track;
            let mut scene = flat_scene();
            for x in t.hurdle_positions() {
                scene.bars.push(Bar {
                    x,
                    y_min: -t.lane_width / 2.0,
                    y_max: t.lane_width / 2.0,
                    top: t.hurdle_height,
                    thickness: t.hurdle_height,
                    hurdle: true,
                });
            }
            let mut w = World::new(scene, cfg.world);
            w.add_agent(humanoid(cfg, sk)?, vec![])?;
            w.add_interaction(Interaction::Bars { agent: 0 })?;
            w
        }
        Sport::Golf => {
            let g = &a.golf;
            let scene = StaticScene {
                faces: vec![],
                terrain: Some((WaveTerrain::new(g.amplitude, g.wavelength, 0.0, FRAC_PI_2), Material::default())),
                bars: vec![],
            };
            let mut w = World::new(scene, cfg.world);
            let club = Implement {
                shape: ImplementShape::Box {
                    half_extents: g.club_half_extents,
                },
                joint: hand,
                offset: [
                    g.club_reach,
                    0.0,
                    g.club_half_extents[2] + 0.002 - cfg.proxy.stand_height - sk.rest_offsets[hand][2],
                ],
                restitution: g.restitution,
                pair: ContactPair::ClubBall,
            };
            w.add_agent(humanoid(cfg, sk)?, vec![club])?;
            w.add_object(SimObject::new(
                ObjectSpec::sphere(g.ball_radius, g.ball_mass, g.restitution, 0.3),
                ObjectKinematics::default(),
            ))?;
            w.add_interaction(Interaction::ImplementObject {
                agent: 0,
                implement: 0,
                object: 0,
            })?;
            w
        }
        Sport::Javelin => {
            let j = &a.javelin;
            let mut w = World::new(flat_scene(), cfg.world);
            w.add_agent(humanoid(cfg, sk)?, vec![])?;
            let mut jav = SimObject::new(
                ObjectSpec {
                    shape: Shape::Capsule {
                        radius: j.radius,
                        half_length: j.length / 2.0,
                    },
                    mass: j.mass,
                    restitution: 0.0,
                    friction: 1.0,
                },
                ObjectKinematics::default(),
            );
            jav.graspable = true;
            w.add_object(jav)?;
            w.add_interaction(Interaction::Grasp { agent: 0, object: 0 })?;
            arena = ArenaFrame::centered(1.0e4, 2.0 * j.field_half_width);
            w
        }
        Sport::Tennis => {
            let t = &a.tennis;
            let mut scene = flat_scene();
            let half_w = t.court[1] / 2.0 + 0.914;
            scene.faces.extend(box_faces(
                Vec3::new(-0.005, -half_w, 0.0),
                Vec3::new(0.005, half_w, t.net_height),
                SurfaceId::Net,
                net_material(),
            ));
            racket_world(cfg, sk, scene, t.racket_radius, t.racket_offset, t.ball_radius, t.ball_mass, t.restitution)?
        }
        Sport::TableTennis => {
            let t = &a.table_tennis;
            let mut scene = flat_scene();
            let [l, wd, h] = t.table;
            scene.faces.extend(box_faces(
                Vec3::new(-l / 2.0, -wd / 2.0, 0.0),
                Vec3::new(l / 2.0, wd / 2.0, h),
                SurfaceId::Table,
                Material::default(),
            ));
            let half_w = wd / 2.0 + 0.1525;
            scene.faces.extend(box_faces(
                Vec3::new(-0.005, -half_w, h),
                Vec3::new(0.005, half_w, h + t.net_height),
                SurfaceId::Net,
                net_material(),
            ));
            racket_world(cfg, sk, scene, t.paddle_radius, t.paddle_offset, t.ball_radius, t.ball_mass, t.restitution)?
        }
        Sport::Fencing | Sport::Boxing => {
            let c = &a.combat;
            let mut w = World::new(flat_scene(), cfg.world);
            let implements = if cfg.sport == Sport::Fencing {
                arena = ArenaFrame::centered(c.piste[0], c.piste[1]);
                vec![Implement {
                    shape: ImplementShape::Capsule {
                        radius: c.sword_radius,
                        half_length: c.sword_length / 2.0,
                    },
                    joint: hand,
                    offset: [c.sword_length / 2.0 + 0.02, 0.0, 0.0],
                    restitution: 0.0,
                    pair: ContactPair::TipTarget,
                }]
            } else {
                arena = ArenaFrame::centered(c.ring[0], c.ring[1]);
                [sk.end_effectors.left_hand, hand]
                    .into_iter()
                    .map(|j| Implement {
                        shape: ImplementShape::Sphere { radius: c.glove_radius },
                        joint: j,
                        offset: [0.05, 0.0, 0.0],
                        restitution: 0.0,
                        pair: ContactPair::TipTarget,
                    })
                    .collect()
            };
            let k = implements.len();
            w.add_agent(humanoid(cfg, sk)?, implements.clone())?;
            w.add_agent(humanoid(cfg, sk)?, implements)?;
            for i in 0..k {
                w.add_interaction(Interaction::Strike {
                    attacker: 0,
                    implement: i,
                    defender: 1,
                })?;
                w.add_interaction(Interaction::Strike {
                    attacker: 1,
                    implement: i,
                    defender: 0,
                })?;
            }
            w
        }
        Sport::PenaltyKick | Sport::SoccerMatch => {
            let s = &a.soccer;
            arena = ArenaFrame::centered(s.field[0], s.field[1]);
            let mut w = World::new(flat_scene(), cfg.world);
            w.add_object(SimObject::new(
                ObjectSpec::sphere(s.ball_radius, s.ball_mass, s.restitution, 0.3),
                ObjectKinematics::default(),
            ))?;
            for agent in 0..cfg.agent_count() {
                w.add_agent(humanoid(cfg, sk)?, vec![])?;
                w.add_interaction(Interaction::JointsObject {
                    agent,
                    joints: feet,
                    radius: s.foot_radius,
                    restitution: s.foot_restitution,
                    object: 0,
                    pair: ContactPair::FootBall,
                })?;
            }
            w
        }
        Sport::FreeThrow => {
            let b = &a.basketball;
            let baseline = b.free_throw_distance + 1.575;
            arena = ArenaFrame {
                center: Vec2::new(baseline - b.court[0] / 2.0, 0.0),
                yaw: 0.0,
                half: [b.court[0] / 2.0, b.court[1] / 2.0],
            };
            let mut scene = flat_scene();
            let bx = b.free_throw_distance + b.rim_radius + 0.15;
            scene.faces.extend(box_faces(
                Vec3::new(bx, -0.9, b.hoop_height - 0.1),
                Vec3::new(bx + 0.05, 0.9, b.hoop_height + 0.95),
                SurfaceId::Backboard,
                Material::default(),
            ));
            let mut w = World::new(scene, cfg.world);
            w.add_agent(humanoid(cfg, sk)?, vec![])?;
            let mut ball = SimObject::new(
                ObjectSpec::sphere(b.ball_radius, b.ball_mass, b.restitution, 0.3),
                ObjectKinematics::default(),
            );
            ball.graspable = true;
            w.add_object(ball)?;
            w.add_interaction(Interaction::Grasp { agent: 0, object: 0 })?;
            w
        }
    };
    Ok((world, arena))
}

#[allow(clippy::too_many_arguments)]
fn racket_world(
    cfg: &SportConfig,
    sk: &SkeletonSpec,
    scene: StaticScene,
    radius: f64,
    offset: f64,
    ball_radius: f64,
    ball_mass: f64,
    restitution: f64,
) -> Result<World> {
    let mut w = World::new(scene, cfg.world);
    let racket = Implement {
        shape: ImplementShape::Disc {
            radius,
            half_thickness: 0.01,
        },
        joint: sk.end_effectors.right_hand,
        offset: [offset, 0.0, 0.0],
        restitution: 0.8,
        pair: ContactPair::RacketBall,
    };
    w.add_agent(humanoid(cfg, sk)?, vec![racket])?;
    w.add_object(SimObject::new(
        ObjectSpec::sphere(ball_radius, ball_mass, restitution, 0.2),
        ObjectKinematics::default(),
    ))?;
    w.add_interaction(Interaction::ImplementObject {
        agent: 0,
        implement: 0,
        object: 0,
    })?;
    Ok(w)
}
