//! Many environments of one sport stepped together over contiguous buffers.

use arrayvec::ArrayVec;
use rayon::prelude::*;

use super::config::SportConfig;
use super::env::SportEnv;
use super::goal::MAX_AGENTS;
use super::state::{EpisodeSummary, MatchState};
use super::termination::TerminationReason;
use crate::error::{Error, Result};
use crate::rewards::RewardBreakdown;

/// A batch of environments. Stream `k` of the batch is seeded by
/// `(seed, streams[k])`, so a stream's trajectory does not depend on its
/// position in the batch or on the worker count.
#[derive(Debug)]
pub struct EnvBatch {
    envs: Vec<SportEnv>,
    obs: Vec<f32>,
    rewards: Vec<f32>,
    dones: Vec<u8>,
    reasons: Vec<Option<TerminationReason>>,
    finished: Vec<Option<EpisodeSummary>>,
    post: Vec<PostStep>,
    pool: Option<rayon::ThreadPool>,
    agents: usize,
    obs_dim: usize,
    action_dim: usize,
}

impl EnvBatch {
    /// `n` environments on streams `0..n`.
    pub fn new(cfg: &SportConfig, seed: u64, n: usize, workers: usize) -> Result<Self> {
        let streams: Vec<u64> = (0..n as u64).collect();
        Self::from_streams(cfg, seed, &streams, workers)
    }

    pub fn from_streams(cfg: &SportConfig, seed: u64, streams: &[u64], workers: usize) -> Result<Self> {
        let envs = streams
            .iter()
            .map(|&s| SportEnv::new(cfg.clone(), seed, s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_envs(envs, workers)
    }

    /// Wraps existing environments, which must all share one configuration.
    pub fn from_envs(envs: Vec<SportEnv>, workers: usize) -> Result<Self> {
        let first = envs
            .first()
            .ok_or_else(|| Error::Config("batch needs at least one environment".into()))?;
        if let Some(other) = envs.iter().find(|e| e.config() != first.config()) {
            return Err(Error::Config(format!(
                "heterogeneous batch: {} and {} environments cannot share a batch",
                first.sport(),
                other.sport()
            )));
        }
        let pool = if workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        let (agents, obs_dim, action_dim) = (first.agent_count(), first.obs_dim(), first.action_dim());
        let n = envs.len();
        let mut b = EnvBatch {
            obs: vec![0.0; n * agents * obs_dim],
            rewards: vec![0.0; n * agents],
            dones: vec![0; n],
            reasons: vec![None; n],
            finished: vec![None; n],
            post: vec![PostStep::default(); n],
            envs,
            pool,
            agents,
            obs_dim,
            action_dim,
        };
        b.refresh_obs()?;
        Ok(b)
    }

    fn refresh_obs(&mut self) -> Result<()> {
        let chunk = self.agents * self.obs_dim;
        for (env, out) in self.envs.iter_mut().zip(self.obs.chunks_mut(chunk)) {
            env.write_obs(out)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    pub fn agents_per_env(&self) -> usize {
        self.agents
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    /// Total action length expected by [`EnvBatch::step`].
    pub fn action_len(&self) -> usize {
        self.envs.len() * self.agents * self.action_dim
    }

    /// Observations, `[env][agent][obs_dim]`.
    pub fn obs(&self) -> &[f32] {
        &self.obs
    }

    /// Rewards of the last step, `[env][agent]`.
    pub fn rewards(&self) -> &[f32] {
        &self.rewards
    }

    /// 1 where the environment finished an episode on the last step.
    pub fn dones(&self) -> &[u8] {
        &self.dones
    }

    pub fn reasons(&self) -> &[Option<TerminationReason>] {
        &self.reasons
    }

    /// Summary of the episode each environment finished on the last step.
    pub fn finished(&self) -> &[Option<EpisodeSummary>] {
        &self.finished
    }

    /// Reward breakdowns and match state of the last step, captured before
    /// any auto-reset.
    pub fn post_step(&self) -> &[PostStep] {
        &self.post
    }

    pub fn envs(&self) -> &[SportEnv] {
        &self.envs
    }

    pub fn env_mut(&mut self, k: usize) -> &mut SportEnv {
        &mut self.envs[k]
    }

    /// Resets every environment to episode 0 of its stream.
    pub fn reset_all(&mut self) -> Result<()> {
        for e in &mut self.envs {
            e.reset_episode(0)?;
        }
        self.dones.fill(0);
        self.rewards.fill(0.0);
        self.reasons.fill(None);
        self.finished.fill(None);
        self.post.fill(PostStep::default());
        self.refresh_obs()
    }

    /// Steps every environment. Finished environments report their reward
    /// and summary, then auto-reset; their observation row already holds
    /// the first observation of the next episode.
    pub fn step(&mut self, actions: &[f32]) -> Result<()> {
        if actions.len() != self.action_len() {
            return Err(Error::InvalidAction(format!(
                "batch expects {} action values, got {}",
                self.action_len(),
                actions.len()
            )));
        }
        if actions.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidAction("non-finite action".into()));
        }
        let a_chunk = self.agents * self.action_dim;
        let o_chunk = self.agents * self.obs_dim;
        let agents = self.agents;
        let envs = &mut self.envs;
        let obs = &mut self.obs;
        let rewards = &mut self.rewards;
        let dones = &mut self.dones;
        let reasons = &mut self.reasons;
        let finished = &mut self.finished;
        let post = &mut self.post;
        match &self.pool {
            None => {
                for item in envs
                    .iter_mut()
                    .zip(actions.chunks(a_chunk))
                    .zip(obs.chunks_mut(o_chunk))
                    .zip(rewards.chunks_mut(agents))
                    .zip(dones.iter_mut())
                    .zip(reasons.iter_mut().zip(finished.iter_mut()).zip(post.iter_mut()))
                {
                    step_one(item)?;
                }
                Ok(())
            }
            Some(pool) => pool.install(|| {
                envs.par_iter_mut()
                    .zip(actions.par_chunks(a_chunk))
                    .zip(obs.par_chunks_mut(o_chunk))
                    .zip(rewards.par_chunks_mut(agents))
                    .zip(dones.par_iter_mut())
                    .zip(reasons.par_iter_mut().zip(finished.par_iter_mut()).zip(post.par_iter_mut()))
                    .try_for_each(step_one)
            }),
        }
    }
}

type Slot<'a> = (
    ((((&'a mut SportEnv, &'a [f32]), &'a mut [f32]), &'a mut [f32]), &'a mut u8),
    ((&'a mut Option<TerminationReason>, &'a mut Option<EpisodeSummary>), &'a mut PostStep),
);

/// Per-environment state of the step that just ran.
#[derive(Debug, Clone, Default)]
pub struct PostStep {
    pub breakdowns: ArrayVec<RewardBreakdown, MAX_AGENTS>,
    pub match_state: MatchState,
}

fn step_one((((((env, act), obs), rew), done), ((reason, fin), post)): Slot<'_>) -> Result<()> {
    let out = env.step(act)?;
    post.breakdowns.clear();
    for (r, b) in rew.iter_mut().zip(env.rewards()) {
        *r = b.total() as f32;
        post.breakdowns.push(b.clone());
    }
    post.match_state = *env.match_state();
    *done = out.done as u8;
    *reason = out.reason;
    if out.done {
        *fin = env.summary();
        env.reset()?;
    } else {
        *fin = None;
    }
    env.write_obs(obs)
}
