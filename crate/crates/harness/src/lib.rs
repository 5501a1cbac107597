//! Episode runner for the sports engine: policies, metric evaluation,
//! trajectory logs with bitwise replay, throughput benchmarks, and the
//! bridge protocol for external training loops.

pub mod alloc;
pub mod bench;
pub mod bridge;
pub mod error;
pub mod eval;
pub mod log;
pub mod policy;

pub use error::{Error, Result};
pub use eval::{run_eval, run_eval_with, EvalOutput, RunSpec};
pub use log::{replay, ReplayVerdict, TrajectoryLog};

// The book's code blocks run as doc-tests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/stepping.md")]
    mod stepping {}
    #[doc = include_str!("../../../book/src/sports.md")]
    mod sports {}
    #[doc = include_str!("../../../book/src/ballistics.md")]
    mod ballistics {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/replay.md")]
    mod replay {}
    #[doc = include_str!("../../../book/src/bridge.md")]
    mod bridge {}
}
