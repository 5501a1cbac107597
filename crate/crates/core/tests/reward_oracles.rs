//! Every reward kernel against an independent scalar reference on random
//! inputs, at piecewise boundaries, and under rigid x-y transforms.

#[path = "support/reward_suite.rs"]
mod suite;

use nalgebra::UnitQuaternion;
use proptest::prelude::*;

use sportsim_core::math::Vec3;
use sportsim_core::rewards::*;

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

#[test]
fn high_jump_matches_reference() {
    suite::high_jump_matches_reference();
}

#[test]
fn long_jump_matches_reference() {
    suite::long_jump_matches_reference();
}

#[test]
fn hurdling_matches_reference() {
    suite::hurdling_matches_reference();
}

#[test]
fn golf_matches_reference() {
    suite::golf_matches_reference();
}

#[test]
fn javelin_matches_reference() {
    suite::javelin_matches_reference();
}

#[test]
fn racket_matches_reference() {
    suite::racket_matches_reference();
}

#[test]
fn combat_matches_reference() {
    suite::combat_matches_reference();
}

#[test]
fn penalty_kick_matches_reference() {
    suite::penalty_kick_matches_reference();
}

#[test]
fn soccer_match_matches_reference() {
    suite::soccer_match_matches_reference();
}

#[test]
fn free_throw_matches_reference() {
    suite::free_throw_matches_reference();
}

#[test]
fn high_jump_window_edges() {
    suite::high_jump_window_edges();
}

#[test]
fn long_jump_line_edge() {
    suite::long_jump_line_edge();
}

#[test]
fn javelin_stage_edges() {
    suite::javelin_stage_edges();
}

#[test]
fn penalty_kick_gate_edge() {
    suite::penalty_kick_gate_edge();
}

#[test]
fn soccer_gate_edge() {
    suite::soccer_gate_edge();
}

#[test]
fn combat_point_threshold_edges() {
    suite::combat_point_threshold_edges();
}

#[test]
fn racket_latch_switches_terms() {
    suite::racket_latch_switches_terms();
}

// Rigid x-y transforms.

fn rigid(a: [f64; 3], yaw: f64, t: [f64; 2]) -> [f64; 3] {
    let (s, c) = yaw.sin_cos();
    [c * a[0] - s * a[1] + t[0], s * a[0] + c * a[1] + t[1], a[2]]
}

fn rigid_vel(a: [f64; 3], yaw: f64) -> [f64; 3] {
    rigid(a, yaw, [0.0, 0.0])
}

fn arb_p(r: f64) -> impl Strategy<Value = [f64; 3]> {
    [-r..r, -r..r, 0.0..r]
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn golf_is_invariant_under_rigid_motion(
        prev in arb_p(8.0), ball in arb_p(8.0), vel in arb_p(15.0), club in arb_p(8.0), target in arb_p(8.0),
        latched: bool, yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let f = |m: &dyn Fn([f64; 3]) -> [f64; 3], mv: &dyn Fn([f64; 3]) -> [f64; 3]| {
            reward_golf(&GolfInput {
                prev_ball: v3(m(prev)), ball: v3(m(ball)), ball_vel: v3(mv(vel)), club: v3(m(club)),
                target: v3(m(target)), contact_latched: latched,
            }, &GolfWeights::default()).total()
        };
        let id = |a| a;
        prop_assert!(same(f(&id, &id), f(&|a| rigid(a, yaw, [tx, ty]), &|a| rigid_vel(a, yaw))));
    }

    #[test]
    fn javelin_is_invariant_under_rigid_motion(
        t in 0.0f64..2.0, hand in arb_p(3.0), jav in arb_p(3.0), prev in arb_p(3.0), root in arb_p(3.0),
        spawn in arb_p(3.0), throw_yaw in -3.2f64..3.2, roll in -3.2f64..3.2, pitch in -1.5f64..1.5,
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let q = UnitQuaternion::from_euler_angles(roll, pitch, throw_yaw);
        let rz = UnitQuaternion::from_axis_angle(&Vec3::z_axis(), yaw);
        let m = |a| rigid(a, yaw, [tx, ty]);
        let w = JavelinWeights::default();
        let a = reward_javelin(&JavelinInput {
            t, hand: v3(hand), javelin_pos: v3(jav), prev_javelin_pos: v3(prev), javelin_orient: q,
            root: v3(root), spawn_root: v3(spawn), throw_yaw,
        }, &w).unwrap().total();
        let b = reward_javelin(&JavelinInput {
            t, hand: v3(m(hand)), javelin_pos: v3(m(jav)), prev_javelin_pos: v3(m(prev)), javelin_orient: rz * q,
            root: v3(m(root)), spawn_root: v3(m(spawn)), throw_yaw: throw_yaw + yaw,
        }, &w).unwrap().total();
        prop_assert!(same(a, b));
    }

    #[test]
    fn racket_is_invariant_under_rigid_motion(
        racket in arb_p(3.0), ball in arb_p(3.0), vel in arb_p(10.0), target in arb_p(3.0),
        latched: bool, hits in 0u32..4, table: bool,
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let sport = if table { RacketSport::TableTennis } else { RacketSport::Tennis };
        let m = |a| rigid(a, yaw, [tx, ty]);
        let w = RacketWeights::default();
        let a = reward_racket(&RacketInput {
            racket: v3(racket), ball: v3(ball), ball_vel: v3(vel), target: v3(target),
            contact_latched: latched, n_hits: hits, sport,
        }, &w).total();
        let b = reward_racket(&RacketInput {
            racket: v3(m(racket)), ball: v3(m(ball)), ball_vel: v3(rigid_vel(vel, yaw)), target: v3(m(target)),
            contact_latched: latched, n_hits: hits, sport,
        }, &w).total();
        prop_assert!(same(a, b));
    }

    #[test]
    fn combat_is_invariant_under_rigid_motion(
        root in arb_p(3.0), vel in arb_p(3.0), heading in -3.2f64..3.2, opp in arb_p(3.0), tip in arb_p(3.0),
        t0 in arb_p(3.0), t1 in arb_p(3.0), point: bool,
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let m = |a| rigid(a, yaw, [tx, ty]);
        let targets = [t0, t1, t0, t1, t0];
        let w = CombatWeights::default();
        let a = reward_combat(&CombatInput {
            root: v3(root), root_vel: v3(vel), yaw: heading, opp_root: v3(opp), tip: v3(tip),
            targets: targets.map(v3), point,
        }, &w).total();
        let b = reward_combat(&CombatInput {
            root: v3(m(root)), root_vel: v3(rigid_vel(vel, yaw)), yaw: heading + yaw, opp_root: v3(m(opp)),
            tip: v3(m(tip)), targets: targets.map(|x| v3(m(x))), point,
        }, &w).total();
        prop_assert!(same(a, b));
    }

    #[test]
    fn soccer_match_is_invariant_under_rigid_motion(
        prev_root in arb_p(3.0), root in arb_p(3.0), prev_ball in arb_p(3.0), ball in arb_p(3.0),
        vel in arb_p(8.0), target in arb_p(10.0), scored in -1i8..=1,
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let m = |a| rigid(a, yaw, [tx, ty]);
        let w = SoccerMatchWeights::default();
        let a = reward_soccer_match(&SoccerMatchInput {
            prev_root: v3(prev_root), root: v3(root), prev_ball: v3(prev_ball), ball: v3(ball),
            ball_vel: v3(vel), target: v3(target), scored,
        }, &w).total();
        let b = reward_soccer_match(&SoccerMatchInput {
            prev_root: v3(m(prev_root)), root: v3(m(root)), prev_ball: v3(m(prev_ball)), ball: v3(m(ball)),
            ball_vel: v3(rigid_vel(vel, yaw)), target: v3(m(target)), scored,
        }, &w).total();
        prop_assert!(same(a, b));
    }

    #[test]
    fn penalty_kick_without_dribble_term_is_invariant(
        prev_root in arb_p(3.0), root in arb_p(3.0), prev_ball in arb_p(3.0), ball in arb_p(3.0),
        vel in arb_p(8.0), target in arb_p(10.0),
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let m = |a| rigid(a, yaw, [tx, ty]);
        let w = PenaltyKickWeights { no_dribble: 0.0, ..Default::default() };
        let a = reward_penalty_kick(&PenaltyKickInput {
            prev_root: v3(prev_root), root: v3(root), prev_ball: v3(prev_ball), ball: v3(ball),
            ball_vel: v3(vel), target: v3(target), ball_spawn_x: 0.0,
        }, &w).total();
        let b = reward_penalty_kick(&PenaltyKickInput {
            prev_root: v3(m(prev_root)), root: v3(m(root)), prev_ball: v3(m(prev_ball)), ball: v3(m(ball)),
            ball_vel: v3(rigid_vel(vel, yaw)), target: v3(m(target)), ball_spawn_x: 0.0,
        }, &w).total();
        prop_assert!(same(a, b));
    }

    #[test]
    fn free_throw_is_invariant_under_rigid_motion(
        ball in arb_p(3.0), vel in arb_p(8.0), basket: bool,
        yaw in -3.2f64..3.2, tx in -20.0f64..20.0, ty in -20.0f64..20.0,
    ) {
        let hoop = [4.5, 0.0, 3.05];
        let m = |a| rigid(a, yaw, [tx, ty]);
        let w = FreeThrowWeights::default();
        let a = reward_free_throw(&FreeThrowInput { ball: v3(ball), ball_vel: v3(vel), hoop: v3(hoop), basket }, &w);
        let b = reward_free_throw(&FreeThrowInput {
            ball: v3(m(ball)), ball_vel: v3(rigid_vel(vel, yaw)), hoop: v3(m(hoop)), basket,
        }, &w);
        prop_assert!(same(a.unwrap().total(), b.unwrap().total()));
    }

    #[test]
    fn clamped_terms_stay_in_unit_interval(
        prev in arb_p(30.0), cur in arb_p(30.0), vel in arb_p(20.0),
    ) {
        let goal = v3(HIGH_JUMP_GOAL);
        let r = reward_high_jump(&HighJumpInput { prev_root: v3(prev), root: v3(cur), goal }, &HighJumpWeights::default());
        let p = r.value("p").unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let h = reward_hurdling(&HurdlingInput { prev_root: v3(prev), root: v3(cur), finish: v3([110.0, 0.0, 1.0]) }, 1.0);
        prop_assert!((0.0..=1.0).contains(&h.total()));
        let a = velocity_alignment(&v3(vel), &v3(prev), &v3(cur));
        prop_assert!((0.0..=1.0).contains(&a));
    }
}
