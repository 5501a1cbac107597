//! Action sources for evaluation and benchmarking.
//!
//! Scripted policies exist to drive reward and termination paths
//! deterministically. Every local policy is a pure function of the
//! environment state, so a run is reproducible from its seed.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sportsim_core::envs::{EnvBatch, Sport, SportEnv};
use sportsim_core::frame::yaw_of;
use sportsim_core::physics::channel;

use crate::error::{Error, Result};

/// Right-wrist marker block in the proxy action layout.
const RIGHT_WRIST: usize = channel::MARKER_BASE + 6;

/// Fills the action buffer of a whole batch, `[env][agent][action_dim]`.
pub trait Policy {
    fn name(&self) -> String;
    fn act_batch(&mut self, batch: &EnvBatch, out: &mut [f32]) -> Result<()>;
}

/// Scripted behaviours shipped with the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scripted {
    /// Full forward speed, nothing else.
    StraightRunner,
    /// Turns toward the ball and runs through it.
    BallChaser,
    /// Holds the grip for a second, then lets go, while sweeping the right
    /// wrist sideways with a one-second period, starting on the right.
    FixedSwing,
}

impl Scripted {
    pub fn name(self) -> &'static str {
        match self {
            Scripted::StraightRunner => "straight-runner",
            Scripted::BallChaser => "ball-chaser",
            Scripted::FixedSwing => "fixed-swing",
        }
    }

    /// The scripted behaviour used for `sport` when none is named.
    pub fn for_sport(sport: Sport) -> Self {
        match sport {
            Sport::HighJump | Sport::LongJump | Sport::Hurdling => Scripted::StraightRunner,
            Sport::PenaltyKick | Sport::SoccerMatch => Scripted::BallChaser,
            _ => Scripted::FixedSwing,
        }
    }

    /// Actions of one environment, `[agent][action_dim]`.
    pub fn act(self, env: &SportEnv, out: &mut [f32]) {
        out.fill(0.0);
        let dim = env.action_dim();
        for (k, a) in out.chunks_mut(dim).enumerate() {
            match self {
                Scripted::StraightRunner => a[channel::FORWARD] = 1.0,
                Scripted::BallChaser => chase(env, k, a),
                Scripted::FixedSwing => {
                    let t = env.elapsed();
                    a[channel::GRIP] = if t < 1.0 { 1.0 } else { -1.0 };
                    a[RIGHT_WRIST + 1] = -(TAU * t).cos() as f32;
                }
            }
        }
    }
}

fn chase(env: &SportEnv, agent: usize, a: &mut [f32]) {
    let Some(ball) = env.world().objects.first() else {
        return;
    };
    let state = env.world().agents[agent].state();
    let Ok(yaw) = yaw_of(state) else {
        return;
    };
    let goal = match env.sport() {
        Sport::SoccerMatch if agent / env.config().arena.soccer.team_size.max(1) == 1 => -env.target(),
        _ => env.target(),
    };
    let (root, ball) = (state.root_pos(), ball.kin.pos);
    let (ux, uy) = unit(goal.x - ball.x, goal.y - ball.y).unwrap_or((1.0, 0.0));
    // Approach from behind the ball with the right foot on its line.
    let (rx, ry) = (root.x - ball.x, root.y - ball.y);
    let behind = -(rx * ux + ry * uy);
    let side = (rx * -uy + ry * ux) - FOOT_OFFSET;
    let (aim_x, aim_y) = if behind > 0.1 && side.abs() < 0.15 {
        (ball.x - uy * FOOT_OFFSET + ux, ball.y + ux * FOOT_OFFSET + uy)
    } else {
        (ball.x - ux * 0.5 - uy * FOOT_OFFSET, ball.y - uy * 0.5 + ux * FOOT_OFFSET)
    };
    let err = wrap((aim_y - root.y).atan2(aim_x - root.x) - yaw);
    a[channel::YAW_RATE] = (3.0 * err).clamp(-1.0, 1.0) as f32;
    a[channel::FORWARD] = (err.cos().max(0.0).powi(2) * 0.6) as f32;
}

/// Lateral offset of the proxy's right foot from the root.
const FOOT_OFFSET: f64 = 0.1;

fn unit(x: f64, y: f64) -> Option<(f64, f64)> {
    let n = x.hypot(y);
    (n > 1e-9).then(|| (x / n, y / n))
}

fn wrap(a: f64) -> f64 {
    (a + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
}

impl FromStr for Scripted {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "straight-runner" => Ok(Scripted::StraightRunner),
            "ball-chaser" => Ok(Scripted::BallChaser),
            "fixed-swing" => Ok(Scripted::FixedSwing),
            _ => Err(Error::Config(format!("unknown scripted policy `{s}`"))),
        }
    }
}

impl Policy for Scripted {
    fn name(&self) -> String {
        Scripted::name(*self).into()
    }

    fn act_batch(&mut self, batch: &EnvBatch, out: &mut [f32]) -> Result<()> {
        per_env(batch, out, |env, a| self.act(env, a))
    }
}

/// Uniform actions in `[-1, 1)`. The draw for a control step is keyed by
/// `(seed, stream, episode, step)`, so it does not depend on batch layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomPolicy {
    pub seed: u64,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy { seed }
    }

    pub fn act(&self, env: &SportEnv, out: &mut [f32]) {
        let mut key = [0u8; 32];
        for (dst, v) in key
            .chunks_exact_mut(8)
            .zip([self.seed, env.stream(), env.episode(), env.steps() as u64])
        {
            dst.copy_from_slice(&v.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        for v in out.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> String {
        "random".into()
    }

    fn act_batch(&mut self, batch: &EnvBatch, out: &mut [f32]) -> Result<()> {
        per_env(batch, out, |env, a| self.act(env, a))
    }
}

/// Zero actions everywhere.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZeroPolicy;

impl Policy for ZeroPolicy {
    fn name(&self) -> String {
        "zero".into()
    }

    fn act_batch(&mut self, batch: &EnvBatch, out: &mut [f32]) -> Result<()> {
        check_len(batch, out)?;
        out.fill(0.0);
        Ok(())
    }
}

fn check_len(batch: &EnvBatch, out: &[f32]) -> Result<()> {
    if out.len() != batch.action_len() {
        return Err(Error::Protocol(format!(
            "action buffer holds {} values, batch needs {}",
            out.len(),
            batch.action_len()
        )));
    }
    Ok(())
}

fn per_env(batch: &EnvBatch, out: &mut [f32], mut f: impl FnMut(&SportEnv, &mut [f32])) -> Result<()> {
    check_len(batch, out)?;
    let chunk = batch.agents_per_env() * batch.action_dim();
    for (env, a) in batch.envs().iter().zip(out.chunks_mut(chunk)) {
        f(env, a);
    }
    Ok(())
}

/// Where a run gets its actions from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySource {
    Random,
    /// A named scripted policy, or the sport's default with `None`.
    Scripted(Option<Scripted>),
    Zero,
    /// A remote policy server reached over the bridge protocol.
    Bridge(String),
}

impl FromStr for PolicySource {
    type Err = Error;

    /// `random`, `zero`, `scripted`, a scripted name, or `tcp://host:port`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(addr) = t.strip_prefix("tcp://") {
            return Ok(PolicySource::Bridge(addr.to_string()));
        }
        match t.to_ascii_lowercase().as_str() {
            "random" => Ok(PolicySource::Random),
            "zero" => Ok(PolicySource::Zero),
            "scripted" => Ok(PolicySource::Scripted(None)),
            other => other.parse().map(|p| PolicySource::Scripted(Some(p))),
        }
    }
}

impl std::fmt::Display for PolicySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicySource::Random => f.write_str("random"),
            PolicySource::Zero => f.write_str("zero"),
            PolicySource::Scripted(None) => f.write_str("scripted"),
            PolicySource::Scripted(Some(p)) => f.write_str(Scripted::name(*p)),
            PolicySource::Bridge(addr) => write!(f, "tcp://{addr}"),
        }
    }
}

impl PolicySource {
    /// Instantiates the policy for `sport`. Bridge sources connect here.
    pub fn build(&self, sport: Sport, seed: u64) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicySource::Random => Box::new(RandomPolicy::new(seed)),
            PolicySource::Zero => Box::new(ZeroPolicy),
            PolicySource::Scripted(p) => Box::new(p.unwrap_or_else(|| Scripted::for_sport(sport))),
            PolicySource::Bridge(addr) => Box::new(crate::bridge::RemotePolicy::connect(addr)?),
        })
    }
}
