use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use sportsim_core::envs::{environment_card, EnvBatch, Sport, SportConfig};
use sportsim_harness::alloc::{allocations, CountingAlloc};
use sportsim_harness::bench::{run_bench, BenchSpec};
use sportsim_harness::policy::PolicySource;
use sportsim_harness::{bridge, replay, run_eval, Error, Result, RunSpec, TrajectoryLog};

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

/// Humanoid sports simulation runner.
#[derive(Parser, Debug)]
#[command(name = "sportsim", version)]
struct Cli {
    /// Directory that relative `--config` paths and per-sport defaults
    /// (`<sport>.toml`) are looked up in.
    #[arg(long, global = true, env = "SPORTSIM_CONFIG_ROOT")]
    config_root: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Collect metrics over a fixed number of finished episodes.
    Eval(EvalArgs),
    /// Measure batched stepping throughput with a random policy.
    Bench(BenchArgs),
    /// Verify that a trajectory log replays bitwise.
    Replay {
        log: PathBuf,
    },
    /// Print the environment card of a sport.
    Card {
        #[arg(long)]
        sport: Sport,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve an environment batch over the bridge protocol.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    sport: Sport,
    /// random, zero, scripted, straight-runner, ball-chaser, fixed-swing or
    /// tcp://host:port.
    #[arg(long, default_value = "scripted")]
    policy: PolicySource,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    log_trajectories: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value = "penalty_kick")]
    sport: Sport,
    #[arg(long, default_value_t = 4096)]
    batch: usize,
    /// Measured seconds.
    #[arg(long, default_value_t = 5.0)]
    seconds: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long)]
    sport: Sport,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:7878")]
    addr: String,
    /// Sessions to serve before exiting.
    #[arg(long, default_value_t = 1)]
    sessions: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn resolve_config(root: Option<&Path>, flag: Option<&Path>, sport: Sport) -> Result<Option<PathBuf>> {
    match (flag, root) {
        (Some(p), Some(root)) if p.is_relative() && !p.exists() => Ok(Some(root.join(p))),
        (Some(p), _) => Ok(Some(p.to_path_buf())),
        (None, Some(root)) => {
            let p = root.join(format!("{sport}.toml"));
            Ok(p.exists().then_some(p))
        }
        (None, None) => Ok(None),
    }
}

fn load(root: Option<&Path>, flag: Option<&Path>, sport: Sport) -> Result<SportConfig> {
    let cfg = match resolve_config(root, flag, sport)? {
        Some(p) => SportConfig::load(&p)?,
        None => SportConfig::new(sport),
    };
    if cfg.sport != sport {
        return Err(Error::Config(format!("config is for {}, not {sport}", cfg.sport)));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let root = cli.config_root.as_deref();
    match cli.cmd {
        Cmd::Eval(a) => {
            let spec = RunSpec {
                sport: a.sport,
                policy: a.policy,
                batch: a.batch,
                trials: a.trials,
                seed: a.seed,
                config: resolve_config(root, a.config.as_deref(), a.sport)?,
                out_dir: a.out,
                log_trajectories: a.log_trajectories,
                workers: a.workers,
            };
            let out = run_eval(&spec)?;
            print!("{}", out.text());
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.faults > 0 {
                eprintln!("{} episode(s) ended in a simulation fault", out.faults);
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Bench(a) => {
            let mut spec = BenchSpec::new(a.sport, a.batch, Duration::from_secs_f64(a.seconds.max(0.0)));
            spec.workers = a.workers;
            spec.seed = a.seed;
            let report = run_bench(&spec, Some(&allocations))?;
            print!("{report}");
        }
        Cmd::Replay { log } => {
            let verdict = replay(&TrajectoryLog::read(&log)?)?;
            println!("{verdict}");
            if !verdict.is_clean() {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Card { sport, config } => {
            print!("{}", environment_card(&load(root, config.as_deref(), sport)?)?);
        }
        Cmd::Serve(a) => {
            let cfg = load(root, a.config.as_deref(), a.sport)?;
            let mut batch = EnvBatch::new(&cfg, a.seed, a.batch, a.workers)?;
            let listener = TcpListener::bind(&a.addr)?;
            eprintln!("serving {} x{} on {}", a.sport, a.batch, listener.local_addr()?);
            for (k, s) in bridge::serve(&listener, &mut batch, a.sessions)?.into_iter().enumerate() {
                match s {
                    Ok(st) => eprintln!("session {k}: {} steps, {} resets, {} errors", st.steps, st.resets, st.errors),
                    Err(e) => eprintln!("session {k}: {e}"),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
