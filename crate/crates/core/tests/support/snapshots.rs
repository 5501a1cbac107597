//! Termination snapshots that trigger one chosen rule.

use sportsim_core::envs::{TermSnapshot, TerminationReason};

/// A snapshot on which `reason` is the rule that fires.
pub fn snapshot_for(reason: TerminationReason) -> TermSnapshot {
    use TerminationReason::*;
    let mut s = TermSnapshot {
        steps: 45,
        javelin_hand_distance: 1.0,
        ..Default::default()
    };
    match reason {
        SimulationFault => s.fault = true,
        Fall => s.fallen = true,
        BarContact => s.bar_contact = true,
        BarNotCleared => s.bar_not_cleared = true,
        OffTrack => s.off_track = true,
        OutOfBounds => s.out_of_bounds = true,
        NoContactTimeout => {
            s.steps = 61;
        }
        BallTooCloseToBody => {
            s.steps = 1;
            s.ball_body_distance = 0.1;
        }
        BallBackward => {
            s.contact_latched = true;
            s.ball_progress = -0.8;
        }
        LostPoint => s.lost_point = true,
        JavelinDetached => s.steps = 3,
        JavelinPoseDeviation => {
            s.steps = 3;
            s.javelin_hand_distance = 0.0;
            s.javelin_pose_error = 2.0;
        }
        JavelinNotReleased => s.javelin_hand_distance = 0.1,
        PointScored => s.point_scored = true,
        TaskComplete => s.task_complete = true,
        TimeLimit => {
            s.steps = 100_000;
            s.contact_latched = true;
        }
    }
    s
}
