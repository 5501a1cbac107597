//! Reward kernels against the independent scalar reference: random
//! sweeps and piecewise boundaries. Each check panics on the first
//! disagreement.

#![allow(dead_code)]

#[path = "reward_reference.rs"]
mod reference;

use std::cell::Cell;

use nalgebra::{Quaternion, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sportsim_core::math::Vec3;
use sportsim_core::rewards::*;

const N: usize = 10_000;
const TOL: f64 = 1e-9;

fn p(rng: &mut ChaCha8Rng, lo: [f64; 3], hi: [f64; 3]) -> [f64; 3] {
    [
        rng.random_range(lo[0]..hi[0]),
        rng.random_range(lo[1]..hi[1]),
        rng.random_range(lo[2]..hi[2]),
    ]
}

fn near(rng: &mut ChaCha8Rng, c: [f64; 3], r: f64) -> [f64; 3] {
    p(rng, [c[0] - r, c[1] - r, c[2] - r], [c[0] + r, c[1] + r, c[2] + r])
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

thread_local! {
    static WORST: Cell<f64> = const { Cell::new(0.0) };
}

/// Largest absolute kernel-versus-reference gap seen by `check` on this
/// thread since the last call.
pub fn take_worst() -> f64 {
    WORST.with(|w| w.replace(0.0))
}

fn check(kernel: &str, i: usize, got: f64, want: f64) {
    WORST.with(|w| w.set(w.get().max((got - want).abs())));
    assert!(
        (got - want).abs() <= TOL * want.abs().max(1.0),
        "{kernel} sample {i}: kernel {got} vs reference {want}"
    );
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn high_jump_matches_reference() {
    let mut r = rng(1);
    let goal = HIGH_JUMP_GOAL;
    for i in 0..N {
        let prev = p(&mut r, [0.0, -2.0, 0.3], [25.0, 8.0, 2.5]);
        let cur = near(&mut r, prev, 0.8);
        let got = reward_high_jump(
            &HighJumpInput {
                prev_root: v3(prev),
                root: v3(cur),
                goal: v3(goal),
            },
            &HighJumpWeights::default(),
        );
        check("high_jump", i, got.total(), reference::high_jump(prev, cur, goal));
    }
}

pub fn long_jump_matches_reference() {
    let mut r = rng(2);
    for i in 0..N {
        let prev = p(&mut r, [0.0, -1.0, 0.3], [28.0, 1.0, 2.0]);
        let cur = near(&mut r, prev, 0.8);
        let vel = p(&mut r, [-2.0, -1.0, -5.0], [12.0, 1.0, 5.0]);
        let got = reward_long_jump(
            &LongJumpInput {
                prev_root: v3(prev),
                root: v3(cur),
                root_vel: v3(vel),
                goal: v3(LONG_JUMP_GOAL),
                jump_line_x: 20.0,
            },
            &LongJumpWeights::default(),
        );
        check("long_jump", i, got.total(), reference::long_jump(prev, cur, vel, LONG_JUMP_GOAL));
    }
}

pub fn hurdling_matches_reference() {
    let mut r = rng(3);
    let finish = [110.0, 0.0, 1.0];
    for i in 0..N {
        let prev = p(&mut r, [0.0, -1.0, 0.5], [112.0, 1.0, 1.8]);
        let cur = near(&mut r, prev, 1.5);
        let got = reward_hurdling(
            &HurdlingInput {
                prev_root: v3(prev),
                root: v3(cur),
                finish: v3(finish),
            },
            1.0,
        );
        check("hurdling", i, got.total(), reference::hurdling(prev, cur, finish));
    }
}

pub fn golf_matches_reference() {
    let mut r = rng(4);
    for i in 0..N {
        let target = p(&mut r, [0.0, -3.0, -0.3], [20.0, 3.0, 0.3]);
        let prev = p(&mut r, [-1.0, -3.0, -0.2], [20.0, 3.0, 6.0]);
        let ball = near(&mut r, prev, 0.5);
        let vel = p(&mut r, [-5.0, -5.0, -10.0], [40.0, 5.0, 20.0]);
        let club = near(&mut r, ball, 0.3);
        let latched = r.random_bool(0.5);
        let literal = r.random_bool(0.3);
        let w = GolfWeights {
            pred_convention: if literal {
                GolfPredConvention::Literal
            } else {
                GolfPredConvention::Target
            },
            ..Default::default()
        };
        let got = reward_golf(
            &GolfInput {
                prev_ball: v3(prev),
                ball: v3(ball),
                ball_vel: v3(vel),
                club: v3(club),
                target: v3(target),
                contact_latched: latched,
            },
            &w,
        );
        let want = reference::golf(prev, ball, vel, club, target, latched, literal);
        check("golf", i, got.total(), want);
    }
}

pub fn javelin_matches_reference() {
    let mut r = rng(5);
    for i in 0..N {
        let t = r.random_range(-0.2..3.0);
        let hand = p(&mut r, [-1.0, -1.0, 0.5], [2.0, 1.0, 2.2]);
        let jav = near(&mut r, hand, 1.0);
        let prev_jav = near(&mut r, jav, 0.6);
        let qv: [f64; 4] = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let n = qv.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        let q = [qv[0] / n, qv[1] / n, qv[2] / n, qv[3] / n];
        let spawn = p(&mut r, [-1.0, -1.0, 0.9], [1.0, 1.0, 1.0]);
        let root = near(&mut r, spawn, 1.0);
        let yaw = r.random_range(-3.2..3.2);
        let got = reward_javelin(
            &JavelinInput {
                t,
                hand: v3(hand),
                javelin_pos: v3(jav),
                prev_javelin_pos: v3(prev_jav),
                javelin_orient: UnitQuaternion::new_normalize(Quaternion::new(q[0], q[1], q[2], q[3])),
                root: v3(root),
                spawn_root: v3(spawn),
                throw_yaw: yaw,
            },
            &JavelinWeights::default(),
        );
        match reference::javelin(t, hand, jav, prev_jav, q, root, spawn, yaw) {
            Some(want) => check("javelin", i, got.unwrap().total(), want),
            None => assert!(got.is_err(), "javelin sample {i}: negative time accepted"),
        }
    }
}

pub fn racket_matches_reference() {
    let mut r = rng(6);
    for i in 0..N {
        let table = r.random_bool(0.5);
        let ball = p(&mut r, [-3.0, -2.0, 0.0], [3.0, 2.0, 3.0]);
        let racket = near(&mut r, ball, 1.0);
        let vel = p(&mut r, [-15.0, -5.0, -8.0], [15.0, 5.0, 8.0]);
        let target = p(&mut r, [-3.0, -2.0, 0.0], [3.0, 2.0, 0.8]);
        let latched = r.random_bool(0.6);
        let hits = r.random_range(0..5);
        let got = reward_racket(
            &RacketInput {
                racket: v3(racket),
                ball: v3(ball),
                ball_vel: v3(vel),
                target: v3(target),
                contact_latched: latched,
                n_hits: hits,
                sport: if table {
                    RacketSport::TableTennis
                } else {
                    RacketSport::Tennis
                },
            },
            &RacketWeights::default(),
        );
        check("racket", i, got.total(), reference::racket(racket, ball, vel, target, latched, hits, table));
    }
}

pub fn combat_matches_reference() {
    let mut r = rng(7);
    for i in 0..N {
        let root = p(&mut r, [-3.0, -1.0, 0.9], [3.0, 1.0, 1.0]);
        let opp = p(&mut r, [-3.0, -1.0, 0.9], [3.0, 1.0, 1.0]);
        let vel = p(&mut r, [-3.0, -3.0, -0.5], [3.0, 3.0, 0.5]);
        let yaw = r.random_range(-3.2..3.2);
        let tip = near(&mut r, opp, 1.2);
        let mut targets = [[0.0; 3]; 5];
        for t in &mut targets {
            *t = near(&mut r, opp, 0.6);
        }
        let point = r.random_bool(0.1);
        let got = reward_combat(
            &CombatInput {
                root: v3(root),
                root_vel: v3(vel),
                yaw,
                opp_root: v3(opp),
                tip: v3(tip),
                targets: targets.map(v3),
                point,
            },
            &CombatWeights::default(),
        );
        check("combat", i, got.total(), reference::combat(root, vel, yaw, opp, tip, &targets, point));
    }
}

pub fn penalty_kick_matches_reference() {
    let mut r = rng(8);
    for i in 0..N {
        let prev_root = p(&mut r, [0.0, -2.0, 0.9], [6.0, 2.0, 1.0]);
        let root = near(&mut r, prev_root, 0.2);
        let prev_ball = p(&mut r, [2.0, -2.0, 0.0575], [14.0, 2.0, 2.0]);
        let ball = near(&mut r, prev_ball, 0.5);
        let ball = [ball[0], ball[1], ball[2].max(0.0575)];
        let vel = p(&mut r, [-5.0, -5.0, -5.0], [25.0, 5.0, 8.0]);
        let target = p(&mut r, [16.0, -2.0, 0.1], [16.0 + 1e-9, 2.0, 2.0]);
        let got = reward_penalty_kick(
            &PenaltyKickInput {
                prev_root: v3(prev_root),
                root: v3(root),
                prev_ball: v3(prev_ball),
                ball: v3(ball),
                ball_vel: v3(vel),
                target: v3(target),
                ball_spawn_x: 4.0,
            },
            &PenaltyKickWeights::default(),
        );
        let want = reference::penalty_kick(prev_root, root, prev_ball, ball, vel, target, 4.0);
        check("penalty_kick", i, got.total(), want);
    }
}

pub fn soccer_match_matches_reference() {
    let mut r = rng(9);
    for i in 0..N {
        let prev_root = p(&mut r, [-16.0, -10.0, 0.9], [16.0, 10.0, 1.0]);
        let root = near(&mut r, prev_root, 0.2);
        let ball = near(&mut r, [root[0], root[1], 0.3], 1.0);
        let prev_ball = near(&mut r, ball, 0.3);
        let vel = p(&mut r, [-10.0, -10.0, -2.0], [10.0, 10.0, 4.0]);
        let target = [16.0, 0.0, 1.0];
        let scored = r.random_range(-1i8..=1);
        let got = reward_soccer_match(
            &SoccerMatchInput {
                prev_root: v3(prev_root),
                root: v3(root),
                prev_ball: v3(prev_ball),
                ball: v3(ball),
                ball_vel: v3(vel),
                target: v3(target),
                scored,
            },
            &SoccerMatchWeights::default(),
        );
        let want = reference::soccer_match(prev_root, root, prev_ball, ball, vel, target, scored);
        check("soccer_match", i, got.total(), want);
    }
}

pub fn free_throw_matches_reference() {
    let mut r = rng(10);
    for i in 0..N {
        let ball = p(&mut r, [-1.0, -1.0, 0.5], [4.0, 1.0, 3.5]);
        let hoop = [4.5, 0.0, 3.05];
        let vel = p(&mut r, [-2.0, -3.0, -3.0], [10.0, 3.0, 12.0]);
        let basket = r.random_bool(0.05);
        let got = reward_free_throw(
            &FreeThrowInput {
                ball: v3(ball),
                ball_vel: v3(vel),
                hoop: v3(hoop),
                basket,
            },
            &FreeThrowWeights::default(),
        );
        check("free_throw", i, got.unwrap().total(), reference::free_throw(ball, vel, hoop, basket).unwrap());
    }
    let hoop = [4.5, 0.0, 3.05];
    assert!(reference::free_throw(hoop, [0.0; 3], hoop, false).is_none());
    assert!(reward_free_throw(
        &FreeThrowInput {
            ball: v3(hoop),
            ball_vel: Vec3::zeros(),
            hoop: v3(hoop),
            basket: false
        },
        &FreeThrowWeights::default()
    )
    .is_err());
}

// Piecewise boundaries: one branch on each side, evaluated 1e-6 away.

pub fn high_jump_window_edges() {
    let goal = v3(HIGH_JUMP_GOAL);
    let w = HighJumpWeights::default();
    let table = [
        (19.5 - 1e-6, 0u8),
        (19.5, 0),
        (19.5 + 1e-6, 1),
        (20.5 - 1e-6, 1),
        (20.5, 2),
        (20.5 + 1e-6, 2),
    ];
    for (x, branch) in table {
        let root = Vec3::new(x, 6.0, 1.5);
        let r = reward_high_jump(&HighJumpInput { prev_root: root, root, goal }, &w);
        assert_eq!(r.branch(), branch, "x = {x}");
        let expect_h = if branch == 1 { 1.5 } else { 0.0 };
        assert!((r.total() - expect_h).abs() < 1e-12, "x = {x}");
    }
}

pub fn long_jump_line_edge() {
    let w = LongJumpWeights::default();
    for (x, branch) in [(20.0 - 1e-6, 0u8), (20.0, 0), (20.0 + 1e-6, 1)] {
        let root = Vec3::new(x, 0.0, 1.0);
        let r = reward_long_jump(
            &LongJumpInput {
                prev_root: root,
                root,
                root_vel: Vec3::zeros(),
                goal: v3(LONG_JUMP_GOAL),
                jump_line_x: 20.0,
            },
            &w,
        );
        assert_eq!(r.branch(), branch, "x = {x}");
        let want = reference::long_jump([x, 0.0, 1.0], [x, 0.0, 1.0], [0.0; 3], LONG_JUMP_GOAL);
        assert!((r.total() - want).abs() < 1e-12);
    }
}

pub fn javelin_stage_edges() {
    let w = JavelinWeights::default();
    let base = JavelinInput {
        t: 0.0,
        hand: Vec3::new(0.0, 0.0, 1.5),
        javelin_pos: Vec3::new(0.1, 0.0, 1.5),
        prev_javelin_pos: Vec3::new(0.0, 0.0, 1.5),
        javelin_orient: UnitQuaternion::identity(),
        root: Vec3::new(0.0, 0.0, 0.95),
        spawn_root: Vec3::new(0.0, 0.0, 0.95),
        throw_yaw: 0.0,
    };
    let table = [
        (0.0, 0u8),
        (0.6 - 1e-6, 0),
        (0.6, 1),
        (0.6 + 1e-6, 1),
        (1.2 - 1e-6, 1),
        (1.2, 2),
        (1.2 + 1e-6, 2),
    ];
    for (t, branch) in table {
        let r = reward_javelin(&JavelinInput { t, ..base }, &w).unwrap();
        assert_eq!(r.branch(), branch, "t = {t}");
    }
    assert!(reward_javelin(&JavelinInput { t: -1e-6, ..base }, &w).is_err());
    assert!(reward_javelin(&JavelinInput { t: f64::NAN, ..base }, &w).is_err());
}

pub fn penalty_kick_gate_edge() {
    let w = PenaltyKickWeights::default();
    let target = Vec3::new(16.0, 0.0, 1.0);
    let prev_ball = Vec3::new(4.0, 0.0, 1.0);
    for (dx, branch) in [(-1e-6, 0u8), (0.0, 0), (1e-6, 1)] {
        let r = reward_penalty_kick(
            &PenaltyKickInput {
                prev_root: Vec3::new(2.0, 0.0, 0.95),
                root: Vec3::new(2.0, 0.0, 0.95),
                prev_ball,
                ball: prev_ball + Vec3::new(dx, 0.0, 0.0),
                ball_vel: Vec3::zeros(),
                target,
                ball_spawn_x: 4.0,
            },
            &w,
        );
        assert_eq!(r.branch(), branch, "dx = {dx}");
    }
}

pub fn soccer_gate_edge() {
    let w = SoccerMatchWeights::default();
    for (d, open) in [(0.5 - 1e-6, true), (0.5, true), (0.5 + 1e-6, false)] {
        let r = reward_soccer_match(
            &SoccerMatchInput {
                prev_root: Vec3::new(0.0, 0.0, 0.95),
                root: Vec3::new(0.0, 0.0, 0.95),
                prev_ball: Vec3::new(d - 0.1, 0.0, 0.1),
                ball: Vec3::new(d, 0.0, 0.1),
                ball_vel: Vec3::new(3.0, 0.0, 0.0),
                target: Vec3::new(16.0, 0.0, 1.0),
                scored: 0,
            },
            &w,
        );
        assert_eq!(r.branch() == 1, open, "d = {d}");
        assert_eq!(r.value("bv2g").unwrap() > 0.0, open);
    }
}

pub fn combat_point_threshold_edges() {
    let w = CombatWeights::default();
    assert!(point_condition(0.1 - 1e-6, 50.0, &w));
    assert!(point_condition(0.1, 50.0 + 1e-6, &w));
    assert!(!point_condition(0.1 + 1e-6, 50.0, &w));
    assert!(!point_condition(0.05, 50.0 - 1e-6, &w));
}

pub fn racket_latch_switches_terms() {
    let w = RacketWeights::default();
    let i = RacketInput {
        racket: Vec3::new(0.0, 0.0, 1.0),
        ball: Vec3::new(0.5, 0.0, 1.0),
        ball_vel: Vec3::new(-3.0, 0.0, 1.0),
        target: Vec3::new(-8.0, 0.0, 0.0),
        contact_latched: false,
        n_hits: 0,
        sport: RacketSport::Tennis,
    };
    let pre = reward_racket(&i, &w);
    let post = reward_racket(&RacketInput { contact_latched: true, ..i }, &w);
    assert_eq!((pre.branch(), post.branch()), (0, 1));
    assert!(post.total() >= 1.0 && pre.total() <= 1.0);
}

/// Random sweeps, one per kernel.
pub const SWEEPS: [(&str, fn()); 10] = [
    ("high_jump", high_jump_matches_reference),
    ("long_jump", long_jump_matches_reference),
    ("hurdling", hurdling_matches_reference),
    ("golf", golf_matches_reference),
    ("javelin", javelin_matches_reference),
    ("racket", racket_matches_reference),
    ("combat", combat_matches_reference),
    ("penalty_kick", penalty_kick_matches_reference),
    ("soccer_match", soccer_match_matches_reference),
    ("free_throw", free_throw_matches_reference),
];

/// Boundary checks.
pub const EDGES: [(&str, fn()); 7] = [
    ("high_jump_window_edges", high_jump_window_edges),
    ("long_jump_line_edge", long_jump_line_edge),
    ("javelin_stage_edges", javelin_stage_edges),
    ("penalty_kick_gate_edge", penalty_kick_gate_edge),
    ("soccer_gate_edge", soccer_gate_edge),
    ("combat_point_threshold_edges", combat_point_threshold_edges),
    ("racket_latch_switches_terms", racket_latch_switches_terms),
];
