//! Deterministic, batch-stepped humanoid sports simulation.

pub mod ballistics;
pub mod body;
pub mod envs;
pub mod error;
pub mod frame;
pub mod math;
pub mod metrics;
pub mod physics;
pub mod rewards;
pub mod selfplay;
pub mod skeleton;

pub use error::{Error, Result};

/// Engine version recorded in trajectory logs and checked on replay.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
