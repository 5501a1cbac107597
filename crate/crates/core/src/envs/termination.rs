//! Episode-ending rules. Each sport evaluates a fixed, ordered rule list and
//! the first rule that fires names the episode's end.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::{Sport, SportConfig};

/// Control rate in Hz.
pub const CONTROL_HZ: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    SimulationFault,
    Fall,
    BarContact,
    BarNotCleared,
    OutOfBounds,
    OffTrack,
    BallBackward,
    NoContactTimeout,
    BallTooCloseToBody,
    LostPoint,
    JavelinDetached,
    JavelinPoseDeviation,
    JavelinNotReleased,
    PointScored,
    TaskComplete,
    TimeLimit,
}

impl TerminationReason {
    pub const ALL: [TerminationReason; 16] = [
        TerminationReason::SimulationFault,
        TerminationReason::Fall,
        TerminationReason::BarContact,
        TerminationReason::BarNotCleared,
        TerminationReason::OutOfBounds,
        TerminationReason::OffTrack,
        TerminationReason::BallBackward,
        TerminationReason::NoContactTimeout,
        TerminationReason::BallTooCloseToBody,
        TerminationReason::LostPoint,
        TerminationReason::JavelinDetached,
        TerminationReason::JavelinPoseDeviation,
        TerminationReason::JavelinNotReleased,
        TerminationReason::PointScored,
        TerminationReason::TaskComplete,
        TerminationReason::TimeLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerminationReason::SimulationFault => "simulation_fault",
            TerminationReason::Fall => "fall",
            TerminationReason::BarContact => "bar_contact",
            TerminationReason::BarNotCleared => "bar_not_cleared",
            TerminationReason::OutOfBounds => "out_of_bounds",
            TerminationReason::OffTrack => "off_track",
            TerminationReason::BallBackward => "ball_backward",
            TerminationReason::NoContactTimeout => "no_contact_timeout",
            TerminationReason::BallTooCloseToBody => "ball_too_close_to_body",
            TerminationReason::LostPoint => "lost_point",
            TerminationReason::JavelinDetached => "javelin_detached",
            TerminationReason::JavelinPoseDeviation => "javelin_pose_deviation",
            TerminationReason::JavelinNotReleased => "javelin_not_released",
            TerminationReason::PointScored => "point_scored",
            TerminationReason::TaskComplete => "task_complete",
            TerminationReason::TimeLimit => "time_limit",
        }
    }

    /// Stable small integer used in logs and on the wire.
    pub fn code(self) -> u8 {
        Self::ALL.iter().position(|r| *r == self).unwrap() as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get((code as usize).checked_sub(1)?).copied()
    }

    /// One-line condition text used by environment cards.
    pub fn describe(self, sport: Sport) -> &'static str {
        use TerminationReason::*;
        match (self, sport) {
            (SimulationFault, _) => "physics reported a non-finite or tunnelling state",
            (Fall, Sport::Hurdling) => "root below 0.15 m, head or torso on the ground, or any body touches a hurdle",
            (Fall, s) if s.agent_sides() > 1 => "any agent's root below 0.15 m or head or torso on the ground",
            (Fall, _) => "root below 0.15 m or head or torso on the ground",
            (BarContact, _) => "any joint passes through the bar",
            (BarNotCleared, _) => "root leaves the crossing window (bar x ± 0.5 m) without having been above the bar",
            (OffTrack, Sport::HighJump) => "root leaves the approach area or passes the bar plane outside the bar",
            (OffTrack, Sport::LongJump) => "root leaves the runway, or runs past the jump line without jumping",
            (OffTrack, _) => "root leaves the lane",
            (OutOfBounds, Sport::Golf) => "ball leaves the course box",
            (OutOfBounds, Sport::PenaltyKick) => "agent leaves the field, or the ball leaves it other than into the goal",
            (OutOfBounds, Sport::FreeThrow) => "agent leaves the court",
            (OutOfBounds, Sport::Fencing) => "either root outside the 14 × 2 m piste",
            (OutOfBounds, Sport::Boxing) => "either root outside the 5 × 5 m ring",
            (OutOfBounds, Sport::SoccerMatch) => "any root outside the field",
            (OutOfBounds, _) => "root leaves the court and its run-off",
            (BallBackward, _) => "after contact, the ball has moved more than 0.5 m away from the target direction",
            (NoContactTimeout, _) => "no club contact and elapsed time > 2 s",
            (BallTooCloseToBody, _) => "ball within 0.3 m (x-y) of the root",
            (LostPoint, Sport::FreeThrow) => "released ball reaches the floor without a basket",
            (LostPoint, _) => "second bounce on the agent's side, or a return that does not land in the opponent half",
            (JavelinDetached, _) => "before 0.6 s, javelin centre more than 0.3 m from the right hand",
            (JavelinPoseDeviation, _) => "before 0.6 s, javelin pose error above tolerance",
            (JavelinNotReleased, _) => "after 1.2 s, javelin centre still within 0.3 m of the right hand",
            (PointScored, Sport::PenaltyKick) => "ball fully crosses the goal line inside the goal",
            (PointScored, Sport::FreeThrow) => "ball drops through the rim",
            (PointScored, _) => "a strike of at least 50 N lands within 0.1 m of a target body",
            (TaskComplete, Sport::HighJump) => "bar cleared and root past the crossing window",
            (TaskComplete, Sport::LongJump) => "landing after a flight that ends past the jump line",
            (TaskComplete, Sport::Hurdling) => "root reaches the finish line",
            (TaskComplete, Sport::Golf) => "after contact the ball comes to rest",
            (TaskComplete, Sport::Javelin) => "released javelin sticks in the ground",
            (TaskComplete, _) => "task finished",
            (TimeLimit, _) => "elapsed time reaches the episode limit",
        }
    }
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Sport {
    /// Number of scoring sides.
    pub fn agent_sides(self) -> usize {
        if self.is_competitive() {
            2
        } else {
            1
        }
    }
}

/// The ordered rule list of `sport`; the first rule that fires wins.
pub fn rules(sport: Sport) -> &'static [TerminationReason] {
    use TerminationReason::*;
    match sport {
        Sport::HighJump => &[SimulationFault, Fall, BarContact, BarNotCleared, OffTrack, TaskComplete, TimeLimit],
        Sport::LongJump => &[SimulationFault, Fall, OffTrack, TaskComplete, TimeLimit],
        Sport::Hurdling => &[SimulationFault, Fall, OffTrack, TaskComplete, TimeLimit],
        Sport::Golf => &[
            SimulationFault,
            Fall,
            NoContactTimeout,
            BallTooCloseToBody,
            BallBackward,
            OutOfBounds,
            TaskComplete,
            TimeLimit,
        ],
        Sport::Javelin => &[
            SimulationFault,
            Fall,
            JavelinDetached,
            JavelinPoseDeviation,
            JavelinNotReleased,
            TaskComplete,
            TimeLimit,
        ],
        Sport::Tennis | Sport::TableTennis => &[SimulationFault, Fall, OutOfBounds, LostPoint, TimeLimit],
        Sport::Fencing | Sport::Boxing => &[SimulationFault, Fall, OutOfBounds, PointScored, TimeLimit],
        Sport::PenaltyKick => &[SimulationFault, Fall, PointScored, OutOfBounds, TimeLimit],
        Sport::SoccerMatch => &[SimulationFault, Fall, OutOfBounds, TimeLimit],
        Sport::FreeThrow => &[SimulationFault, Fall, PointScored, LostPoint, OutOfBounds, TimeLimit],
    }
}

/// Elapsed episode time after `steps` control steps.
pub fn elapsed(steps: u32) -> f64 {
    steps as f64 / CONTROL_HZ
}

/// Javelin stage for elapsed time `t`: 0 hold, 1 throw, 2 flight.
pub fn javelin_stage(t: f64, stage_times: [f64; 2]) -> u8 {
    if t < stage_times[0] {
        0
    } else if t < stage_times[1] {
        1
    } else {
        2
    }
}

/// Facts the rules read, gathered by the environment after each step.
/// Fields that do not apply to a sport are ignored by its rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermSnapshot {
    pub steps: u32,
    pub fault: bool,
    pub fallen: bool,
    pub bar_contact: bool,
    pub bar_not_cleared: bool,
    pub off_track: bool,
    pub out_of_bounds: bool,
    pub contact_latched: bool,
    /// x-y distance between the root and the ball.
    pub ball_body_distance: f64,
    /// Ball displacement along the target direction since first contact.
    pub ball_progress: f64,
    pub lost_point: bool,
    /// Distance from the right hand to the javelin centre.
    pub javelin_hand_distance: f64,
    pub javelin_pose_error: f64,
    pub point_scored: bool,
    pub task_complete: bool,
}

impl Default for TermSnapshot {
    fn default() -> Self {
        TermSnapshot {
            steps: 0,
            fault: false,
            fallen: false,
            bar_contact: false,
            bar_not_cleared: false,
            off_track: false,
            out_of_bounds: false,
            contact_latched: false,
            ball_body_distance: f64::INFINITY,
            ball_progress: 0.0,
            lost_point: false,
            javelin_hand_distance: 0.0,
            javelin_pose_error: 0.0,
            point_scored: false,
            task_complete: false,
        }
    }
}

fn fires(rule: TerminationReason, cfg: &SportConfig, s: &TermSnapshot) -> bool {
    use TerminationReason::*;
    let t = elapsed(s.steps);
    let golf = &cfg.arena.golf;
    let jav = &cfg.arena.javelin;
    let stage = javelin_stage(t, cfg.weights.javelin.stage_times);
    match rule {
        SimulationFault => s.fault,
        Fall => s.fallen,
        BarContact => s.bar_contact,
        BarNotCleared => s.bar_not_cleared,
        OffTrack => s.off_track,
        OutOfBounds => s.out_of_bounds,
        NoContactTimeout => !s.contact_latched && t > golf.contact_timeout,
        BallTooCloseToBody => s.ball_body_distance < golf.too_close,
        BallBackward => s.contact_latched && s.ball_progress < -golf.backward_limit,
        LostPoint => s.lost_point,
        JavelinDetached => stage == 0 && s.javelin_hand_distance > jav.hand_radius,
        JavelinPoseDeviation => stage == 0 && s.javelin_pose_error > jav.pose_tolerance,
        JavelinNotReleased => stage == 2 && s.javelin_hand_distance < jav.hand_radius,
        PointScored => s.point_scored,
        TaskComplete => s.task_complete,
        TimeLimit => t >= cfg.time_limit,
    }
}

/// Evaluates `cfg.sport`'s rule list in order.
pub fn check_termination(cfg: &SportConfig, s: &TermSnapshot) -> Option<TerminationReason> {
    rules(cfg.sport).iter().copied().find(|r| fires(*r, cfg, s))
}
