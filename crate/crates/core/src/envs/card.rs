//! Human-readable environment cards.

use std::fmt::Write;

use super::config::{CurriculumMode, SportConfig};
use super::env::SportEnv;
use super::termination::{rules, CONTROL_HZ};
use crate::error::Result;

/// Markdown card listing dimensions, timing, reward terms and termination
/// rules in evaluation order.
pub fn environment_card(cfg: &SportConfig) -> Result<String> {
    let mut env = SportEnv::new(cfg.clone(), 0, 0)?;
    let zeros = vec![0.0f32; env.action_dim() * env.agent_count()];
    env.step(&zeros)?;
    let sk = cfg.skeleton_spec();
    let mut s = String::new();
    let _ = writeln!(s, "# {}\n", cfg.sport);
    let _ = writeln!(s, "| property | value |\n|---|---|");
    let _ = writeln!(s, "| skeleton | {} ({} joints) |", sk.name, sk.joint_count);
    let _ = writeln!(s, "| agents | {} |", env.agent_count());
    let _ = writeln!(s, "| observation | {} (proprioception {}, goal {}) |", env.obs_dim(), 15 * sk.joint_count, env.goal_dim());
    let _ = writeln!(s, "| action | {} |", env.action_dim());
    let _ = writeln!(s, "| control rate | {CONTROL_HZ} Hz |");
    let _ = writeln!(s, "| time limit | {} s |", cfg.time_limit);
    let cur = match &cfg.curriculum.mode {
        CurriculumMode::Ladder { levels } => format!("ladder {levels:?}"),
        CurriculumMode::Uniform { lo, hi } => format!("uniform [{lo}, {hi}]"),
        CurriculumMode::Fixed { value } => format!("fixed {value}"),
        CurriculumMode::Off => "off".into(),
    };
    let _ = writeln!(s, "| curriculum | {cur} |");
    let _ = writeln!(s, "\n## Reward terms\n\n| term | weight |\n|---|---|");
    for t in env.rewards()[0].terms() {
        let _ = writeln!(s, "| {} | {} |", t.name, t.weight);
    }
    let _ = writeln!(s, "\n## Termination (first match wins)\n\n| # | reason | condition |\n|---|---|---|");
    for (k, r) in rules(cfg.sport).iter().enumerate() {
        let _ = writeln!(s, "| {} | {} | {} |", k + 1, r, r.describe(cfg.sport));
    }
    Ok(s)
}
