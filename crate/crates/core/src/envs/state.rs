//! Scoring state and per-episode summaries.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use super::config::Sport;
use super::goal::MAX_AGENTS;
use super::termination::TerminationReason;

/// Score and rally bookkeeping for sports with points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatchState {
    pub score: [u32; 2],
    /// Side that last served or kicked off.
    pub server: u8,
    /// Successful returns in the current rally.
    pub n_hit: u32,
    /// Set on the step a point event happened.
    pub point_latch: bool,
    /// Point events won by each side.
    pub points_won: [u32; 2],
    /// Point events conceded by each side.
    pub points_conceded: [u32; 2],
}

impl MatchState {
    /// Awards one point to `side`; the other side concedes it.
    pub fn award(&mut self, side: usize) {
        let other = 1 - side;
        self.score[side] += 1;
        self.points_won[side] += 1;
        self.points_conceded[other] += 1;
        self.point_latch = true;
        self.n_hit = 0;
    }

    /// Start-of-step clear of the one-step latch.
    pub fn begin_step(&mut self) {
        self.point_latch = false;
    }

    /// `[score_a, score_b, server, n_hit, latch]` as floats for logs.
    pub fn to_array(&self) -> [f32; 5] {
        [
            self.score[0] as f32,
            self.score[1] as f32,
            self.server as f32,
            self.n_hit as f32,
            if self.point_latch { 1.0 } else { 0.0 },
        ]
    }
}

/// What one finished episode contributes to evaluation metrics. Optional
/// fields are `None` where the quantity is undefined for the episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub sport: Sport,
    /// Index of the environment stream that ran the episode.
    pub stream: u64,
    pub episode: u64,
    pub steps: u32,
    pub reason: TerminationReason,
    pub success: bool,
    /// Agent travel (long jump, hurdling), peak root height (high jump) or
    /// object travel (golf, javelin, kicks), meters.
    pub distance: Option<f64>,
    pub hits: Option<u32>,
    /// Distance between the intended target and where the object landed.
    pub error_distance: Option<f64>,
    /// Golf: whether the club touched the ball.
    pub hit: Option<bool>,
    /// Elapsed seconds.
    pub time: f64,
    pub returns: ArrayVec<f64, MAX_AGENTS>,
    pub score: [u32; 2],
    /// Curriculum level used (bar or hurdle height), when one applies.
    pub level: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn award_keeps_points_balanced() {
        let mut m = MatchState::default();
        m.n_hit = 3;
        m.award(0);
        m.award(1);
        m.award(0);
        assert_eq!(m.score, [2, 1]);
        assert_eq!(m.points_won[0], m.points_conceded[1]);
        assert_eq!(m.points_won[1], m.points_conceded[0]);
        assert_eq!(m.n_hit, 0);
        assert!(m.point_latch);
        m.begin_step();
        assert!(!m.point_latch);
    }
}
