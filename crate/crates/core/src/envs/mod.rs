//! Sport environments: configuration, observation layouts, rules, rewards
//! wiring and batched stepping.

pub mod batch;
pub mod card;
pub mod config;
pub mod env;
pub mod goal;
pub mod state;
pub mod termination;

pub use batch::{EnvBatch, PostStep};
pub use card::environment_card;
pub use config::{Arena, CurriculumConfig, CurriculumMode, RewardWeights, SkeletonKind, Sport, SportConfig};
pub use env::{SportEnv, StepOutcome};
pub use goal::{goal_dim, obs_dim, ArenaFrame, SportGoal, MAX_AGENTS};
pub use state::{EpisodeSummary, MatchState};
pub use termination::{check_termination, rules, TermSnapshot, TerminationReason, CONTROL_HZ};
