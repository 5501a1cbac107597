//! Metric evaluation over a fixed number of finished episodes.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use sportsim_core::envs::{EnvBatch, EpisodeSummary, Sport, SportConfig, TerminationReason};
use sportsim_core::metrics::{MetricReport, MetricsAccumulator};

use crate::error::{Error, Result};
use crate::log::{config_hash, schema_text, LogHeader, LogWriter, StepView};
use crate::policy::PolicySource;

/// Everything needed to reproduce an evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub sport: Sport,
    pub policy: PolicySource,
    /// Environments stepped together.
    pub batch: usize,
    /// Finished episodes to collect.
    pub trials: usize,
    pub seed: u64,
    /// TOML overrides; the sport's defaults when `None`.
    pub config: Option<PathBuf>,
    /// Directory for tables and logs; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub log_trajectories: bool,
    /// Worker lanes stepping the batch.
    pub workers: usize,
}

impl RunSpec {
    pub fn new(sport: Sport, policy: PolicySource) -> Self {
        RunSpec {
            sport,
            policy,
            batch: 64,
            trials: 1000,
            seed: 0,
            config: None,
            out_dir: None,
            log_trajectories: false,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trial count must be at least 1".into()));
        }
        if self.batch == 0 || self.workers == 0 {
            return Err(Error::Config("batch size and worker count must be at least 1".into()));
        }
        Ok(())
    }

    /// The configuration this spec runs: the override file, or defaults.
    pub fn load_config(&self) -> Result<SportConfig> {
        let cfg = match &self.config {
            Some(p) => SportConfig::load(p)?,
            None => SportConfig::new(self.sport),
        };
        if cfg.sport != self.sport {
            return Err(Error::Config(format!(
                "config file is for {}, run asks for {}",
                cfg.sport, self.sport
            )));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub config_hash: String,
    pub seed: u64,
    pub policy: String,
    pub report: MetricReport,
    pub metrics: MetricsAccumulator,
    /// Collected episodes in completion order.
    pub episodes: Vec<EpisodeSummary>,
    pub env_steps: u64,
    /// Episodes that ended in a simulation fault.
    pub faults: usize,
    /// In-memory trajectory log, when logging without an output directory.
    pub log: Option<Vec<u8>>,
    pub files: Vec<PathBuf>,
}

impl EvalOutput {
    fn stamp(&self) -> String {
        format!(
            "# sport={} policy={} seed={} config_sha256={}\n",
            self.report.sport, self.policy, self.seed, self.config_hash
        )
    }

    /// The metric table as CSV behind a provenance comment line.
    pub fn csv(&self) -> String {
        self.stamp() + &self.report.to_csv()
    }

    /// Aligned table plus the one-line column layout.
    pub fn text(&self) -> String {
        let (head, vals) = self.report.table_row();
        format!("{}{}\n{head}\n{vals}\n", self.stamp(), self.report.to_text())
    }
}

enum LogSink {
    None,
    Memory(LogWriter<Vec<u8>>),
    File(LogWriter<BufWriter<File>>),
}

/// Loads the run's configuration and runs it.
pub fn run_eval(spec: &RunSpec) -> Result<EvalOutput> {
    let cfg = spec.load_config()?;
    run_eval_with(spec, &cfg)
}

/// Runs `cfg` under `spec` until exactly `spec.trials` episodes have
/// finished. Episodes are taken in completion order, ties broken by batch
/// index; episodes still running at that point are discarded.
pub fn run_eval_with(spec: &RunSpec, cfg: &SportConfig) -> Result<EvalOutput> {
    spec.validate()?;
    if cfg.sport != spec.sport {
        return Err(Error::Config(format!("config is for {}, run asks for {}", cfg.sport, spec.sport)));
    }
    let mut batch = EnvBatch::new(cfg, spec.seed, spec.batch, spec.workers)?;
    let mut policy = spec.policy.build(spec.sport, spec.seed)?;
    let policy_name = policy.name();
    let hash = config_hash(cfg);

    let mut files = Vec::new();
    if let Some(dir) = &spec.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut sink = if spec.log_trajectories {
        let header = LogHeader::new(cfg, spec.seed, &policy_name)?;
        match &spec.out_dir {
            Some(dir) => {
                let path = dir.join(format!("{}.traj", spec.sport));
                let schema = dir.join(format!("{}.traj.schema.txt", spec.sport));
                std::fs::write(&schema, schema_text(&header))?;
                files.push(path.clone());
                files.push(schema);
                LogSink::File(LogWriter::new(BufWriter::new(File::create(path)?), header)?)
            }
            None => LogSink::Memory(LogWriter::new(Vec::new(), header)?),
        }
    } else {
        LogSink::None
    };

    let lanes = spec.workers.min(spec.batch);
    let mut shards: Vec<MetricsAccumulator> = (0..lanes).map(|_| MetricsAccumulator::new(spec.sport)).collect();
    let mut episodes = Vec::with_capacity(spec.trials);
    let mut actions = vec![0.0f32; batch.action_len()];
    let mut prev_obs = Vec::new();
    let mut heads: Vec<(u64, u64, u32)> = Vec::new();
    let mut env_steps = 0u64;
    let mut faults = 0;
    let shard_len = spec.batch.div_ceil(lanes);

    while episodes.len() < spec.trials {
        policy.act_batch(&batch, &mut actions)?;
        if !matches!(sink, LogSink::None) {
            prev_obs.clear();
            prev_obs.extend_from_slice(batch.obs());
            heads.clear();
            heads.extend(batch.envs().iter().map(|e| (e.stream(), e.episode(), e.steps())));
        }
        batch.step(&actions)?;
        env_steps += batch.len() as u64;
        write_records(&mut sink, &batch, &prev_obs, &actions, &heads)?;
        for (k, fin) in batch.finished().iter().enumerate() {
            if let Some(s) = fin {
                if episodes.len() == spec.trials {
                    break;
                }
                if s.reason == TerminationReason::SimulationFault {
                    faults += 1;
                }
                shards[k / shard_len].record_trial(s)?;
                episodes.push(s.clone());
            }
        }
    }

    let mut metrics = MetricsAccumulator::new(spec.sport);
    for s in &shards {
        metrics.merge(s)?;
    }
    let log = match sink {
        LogSink::None => None,
        LogSink::Memory(w) => Some(w.finish()?),
        LogSink::File(w) => {
            w.finish()?;
            None
        }
    };
    let out = EvalOutput {
        config_hash: hash,
        seed: spec.seed,
        policy: policy_name,
        report: metrics.report(),
        metrics,
        episodes,
        env_steps,
        faults,
        log,
        files,
    };
    if let Some(dir) = &spec.out_dir {
        let mut files = out.files.clone();
        files.push(write_file(dir, &format!("{}_metrics.csv", spec.sport), &out.csv())?);
        files.push(write_file(dir, &format!("{}_metrics.txt", spec.sport), &out.text())?);
        return Ok(EvalOutput { files, ..out });
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    std::fs::write(&p, text)?;
    Ok(p)
}

fn write_records(
    sink: &mut LogSink,
    batch: &EnvBatch,
    obs: &[f32],
    actions: &[f32],
    heads: &[(u64, u64, u32)],
) -> Result<()> {
    let o = batch.agents_per_env() * batch.obs_dim();
    let a = batch.agents_per_env() * batch.action_dim();
    for (k, (post, &(stream, episode, step))) in batch.post_step().iter().zip(heads).enumerate() {
        let view = StepView {
            stream,
            episode,
            step,
            obs: &obs[k * o..(k + 1) * o],
            actions: &actions[k * a..(k + 1) * a],
            rewards: &post.breakdowns,
            reason: batch.reasons()[k],
            match_state: &post.match_state,
        };
        match sink {
            LogSink::None => return Ok(()),
            LogSink::Memory(w) => w.write_step(&view)?,
            LogSink::File(w) => w.write_step(&view)?,
        }
    }
    Ok(())
}
