//! Batched stepping throughput under a random policy.

use std::time::{Duration, Instant};

use sportsim_core::envs::{EnvBatch, Sport, SportConfig};

use crate::error::{Error, Result};
use crate::policy::{Policy, RandomPolicy};

const MAX_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub sport: Sport,
    pub batch: usize,
    /// Minimum measured wall time.
    pub duration: Duration,
    /// Minimum measured batch steps.
    pub min_steps: u64,
    /// Unmeasured batch steps run first.
    pub warmup: u64,
    pub workers: usize,
    pub seed: u64,
}

impl BenchSpec {
    pub fn new(sport: Sport, batch: usize, duration: Duration) -> Self {
        BenchSpec {
            sport,
            batch,
            duration,
            min_steps: 1,
            warmup: 10,
            workers: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub sport: Sport,
    pub batch: usize,
    pub workers: usize,
    pub batch_steps: u64,
    pub env_steps: u64,
    /// Time spent inside `EnvBatch::step`.
    pub step_seconds: f64,
    /// Wall time including action generation.
    pub wall_seconds: f64,
    /// Environment steps per second of stepping time.
    pub steps_per_sec: f64,
    /// Environment steps per second of wall time.
    pub wall_steps_per_sec: f64,
    pub p50_ms: f64,
    pub p99_ms: f64,
    /// Allocations during the measured window, when a counter was given.
    pub allocations: Option<u64>,
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "sport        {}", self.sport)?;
        writeln!(f, "batch        {} ({} worker(s))", self.batch, self.workers)?;
        writeln!(f, "env steps    {} in {:.3} s", self.env_steps, self.wall_seconds)?;
        writeln!(f, "throughput   {:.0} env-steps/s stepping, {:.0} with policy", self.steps_per_sec, self.wall_steps_per_sec)?;
        writeln!(f, "latency      p50 {:.3} ms, p99 {:.3} ms per batch step", self.p50_ms, self.p99_ms)?;
        match self.allocations {
            Some(n) => writeln!(f, "allocations  {n} in the measured window"),
            None => writeln!(f, "allocations  not counted"),
        }
    }
}

/// Runs `spec`. `alloc_count`, when given, is sampled before and after the
/// measured window.
pub fn run_bench(spec: &BenchSpec, alloc_count: Option<&dyn Fn() -> u64>) -> Result<BenchReport> {
    if spec.batch == 0 || spec.workers == 0 {
        return Err(Error::Config("batch size and worker count must be at least 1".into()));
    }
    let cfg = SportConfig::new(spec.sport);
    let mut batch = EnvBatch::new(&cfg, spec.seed, spec.batch, spec.workers)?;
    let mut policy = RandomPolicy::new(spec.seed);
    let mut actions = vec![0.0f32; batch.action_len()];
    for _ in 0..spec.warmup {
        policy.act_batch(&batch, &mut actions)?;
        batch.step(&actions)?;
    }
    let mut samples = Vec::with_capacity(MAX_SAMPLES);
    let mut stepping = Duration::ZERO;
    let mut steps = 0u64;
    let before = alloc_count.map(|f| f());
    let start = Instant::now();
    while steps < spec.min_steps || start.elapsed() < spec.duration {
        policy.act_batch(&batch, &mut actions)?;
        let t = Instant::now();
        batch.step(&actions)?;
        let dt = t.elapsed();
        stepping += dt;
        if samples.len() < MAX_SAMPLES {
            samples.push(dt.as_secs_f64() * 1e3);
        }
        steps += 1;
    }
    let wall = start.elapsed().as_secs_f64();
    let allocations = alloc_count.zip(before).map(|(f, b)| f() - b);
    samples.sort_by(f64::total_cmp);
    let env_steps = steps * spec.batch as u64;
    let step_seconds = stepping.as_secs_f64();
    Ok(BenchReport {
        sport: spec.sport,
        batch: spec.batch,
        workers: spec.workers,
        batch_steps: steps,
        env_steps,
        step_seconds,
        wall_seconds: wall,
        steps_per_sec: env_steps as f64 / step_seconds,
        wall_steps_per_sec: env_steps as f64 / wall,
        p50_ms: percentile(&samples, 0.50),
        p99_ms: percentile(&samples, 0.99),
        allocations,
    })
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}
