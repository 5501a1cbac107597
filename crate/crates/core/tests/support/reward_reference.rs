// Scalar reference rewards written on plain arrays, without the crate's
// vector types or ballistics helpers. Shared by the core oracle tests and
// the acceptance suite.
#![allow(dead_code)]

pub type P = [f64; 3];

pub const G: f64 = 9.81;

pub fn dist(a: P, b: P) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn dist2(a: P, b: P) -> f64 {
    dist(a, b).powi(2)
}

pub fn dist_xy2(a: [f64; 2], b: P) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn clamp01(x: f64) -> f64 {
    x.max(0.0).min(1.0)
}

fn prog(prev: P, cur: P, goal: P) -> f64 {
    dist(prev, goal) - dist(cur, goal)
}

/// Largest time at which z(t) = h on the way down, if it is not in the past.
pub fn fall_time(z0: f64, vz: f64, h: f64) -> Option<f64> {
    // h = z0 + vz t - g t^2 / 2  =>  (g/2) t^2 - vz t + (h - z0) = 0
    let a = 0.5 * G;
    let b = -vz;
    let c = h - z0;
    let d = b * b - 4.0 * a * c;
    if d < 0.0 {
        return None;
    }
    let t = (-b + d.sqrt()) / (2.0 * a);
    if t >= 0.0 {
        Some(t)
    } else {
        None
    }
}

pub fn ground_land(p: P, v: P) -> [f64; 2] {
    if p[2] < 0.0 {
        return [p[0], p[1]];
    }
    let t = fall_time(p[2], v[2], 0.0).unwrap();
    [p[0] + v[0] * t, p[1] + v[1] * t]
}

pub fn align(v: P, from: P, to: P) -> f64 {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    let n = (dx * dx + dy * dy).sqrt();
    if n < 1e-12 {
        return 0.0;
    }
    clamp01((v[0] * dx + v[1] * dy) / n / 1.5)
}

pub fn high_jump(prev: P, cur: P, goal: P) -> f64 {
    let p = clamp01(prog(prev, cur, goal));
    if cur[0] > 19.5 && cur[0] < 20.5 {
        p + cur[2]
    } else {
        p
    }
}

pub fn long_jump(prev: P, cur: P, vel: P, goal: P) -> f64 {
    let base = clamp01(prog(prev, cur, goal)) + 0.01 * vel[0];
    if cur[0] <= 20.0 {
        base
    } else {
        base + 0.1 * cur[2] + 30.0 * (cur[0] - 20.0)
    }
}

pub fn hurdling(prev: P, cur: P, finish: P) -> f64 {
    clamp01(prog(prev, cur, finish))
}

pub fn golf(prev_ball: P, ball: P, vel: P, club: P, target: P, latched: bool, literal: bool) -> f64 {
    let rp = clamp01(prog(prev_ball, ball, target));
    let rc = if latched { 1.0 } else { (-100.0 * dist2(ball, club)).exp() };
    let rg = (-0.1 * dist_xy2([ball[0], ball[1]], target)).exp();
    let land = ground_land(ball, vel);
    let reference = if literal { ball } else { target };
    let rpred = (-0.1 * dist_xy2(land, reference)).exp();
    rp + rc + rg + rpred
}

/// Rotation matrix columns of a unit quaternion (w, x, y, z).
pub fn quat_cols(q: [f64; 4]) -> [[f64; 3]; 3] {
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y + w * z), 2.0 * (x * z - w * y)],
        [2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z + w * x)],
        [2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Default flying pose for a throw heading `yaw`: forward axis pitched up 30°.
pub fn javelin_default_cols(yaw: f64) -> [[f64; 3]; 3] {
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = (30f64.to_radians().sin(), 30f64.to_radians().cos());
    // Rz(yaw) * Ry(-30°): first column is the javelin's long axis.
    [
        [cy * cp, sy * cp, sp],
        [-sy, cy, 0.0],
        [-cy * sp, -sy * sp, cp],
    ]
}

pub fn javelin(
    t: f64,
    hand: P,
    jav: P,
    prev_jav: P,
    q: [f64; 4],
    root: P,
    spawn: P,
    yaw: f64,
) -> Option<f64> {
    if !(t >= 0.0) {
        return None;
    }
    let grab = (-dist2(hand, jav)).exp();
    let a = quat_cols(q);
    let b = javelin_default_cols(yaw);
    let mut e = 0.0;
    for c in 0..2 {
        for r in 0..3 {
            e += (a[c][r] - b[c][r]).powi(2);
        }
    }
    let js = (-e).exp();
    let s = (-dist2(root, spawn)).exp();
    let goal = clamp01(yaw.cos() * (jav[0] - prev_jav[0]) + yaw.sin() * (jav[1] - prev_jav[1]));
    Some(if t < 0.6 {
        0.9 * grab + 0.1 * js
    } else if t < 1.2 {
        0.9 * goal + 0.05 * s - 0.05 * grab
    } else {
        0.9 * goal + 0.1 * js
    })
}

pub fn racket(racket: P, ball: P, vel: P, target: P, latched: bool, hits: u32, table: bool) -> f64 {
    if !latched {
        return (-dist2(racket, ball)).exp();
    }
    let land = if table {
        fall_time(ball[2], vel[2], 0.76).map(|t| [ball[0] + vel[0] * t, ball[1] + vel[1] * t])
    } else {
        Some(ground_land(ball, vel))
    };
    let near = land.map_or(0.0, |l| (-dist_xy2(l, target)).exp());
    1.0 + near + if table { hits as f64 } else { 0.0 }
}

pub fn combat(root: P, vel: P, yaw: f64, opp: P, tip: P, targets: &[P; 5], point: bool) -> f64 {
    let dx = opp[0] - root[0];
    let dy = opp[1] - root[1];
    let n = dx.hypot(dy);
    let facing = if n < 1e-12 { 0.0 } else { clamp01((yaw.cos() * dx + yaw.sin() * dy) / n) };
    let v = align(vel, root, opp);
    let mut m = f64::INFINITY;
    for t in targets {
        m = m.min(dist(tip, *t));
    }
    0.1 * facing + 0.1 * v + 0.6 * (-10.0 * m * m).exp() + if point { 1.0 } else { 0.0 }
}

pub fn penalty_kick(prev_root: P, root: P, prev_ball: P, ball: P, vel: P, target: P, spawn_x: f64) -> f64 {
    let g = prog(prev_ball, ball, target);
    let dribble = if root[0] > spawn_x { -1.0 } else { 0.0 };
    if g <= 0.0 {
        0.4 * (dist(prev_root, prev_ball) - dist(root, ball)) + dribble
    } else {
        let land = ground_land(ball, vel);
        0.1 * g + 0.1 * align(vel, ball, target) + 0.8 * (-dist_xy2(land, target)).exp() + dribble
    }
}

pub fn soccer_match(prev_root: P, root: P, prev_ball: P, ball: P, vel: P, target: P, scored: i8) -> f64 {
    let mut r = 0.4 * (dist(prev_root, prev_ball) - dist(root, ball)) + 100.0 * scored as f64;
    if (root[0] - ball[0]).hypot(root[1] - ball[1]) <= 0.5 {
        r += 0.1 * prog(prev_ball, ball, target) + 0.1 * align(vel, ball, target);
    }
    r
}

/// Pass-through desired launch velocity.
pub fn desired_velocity(ball: P, hoop: P) -> Option<P> {
    let d = [hoop[0] - ball[0], hoop[1] - ball[1], hoop[2] - ball[2]];
    let horiz = d[0].hypot(d[1]);
    if horiz <= 1e-12 && d[2].abs() <= 1e-12 {
        return None;
    }
    let t = if d[2].abs() > 1e-9 { (2.0 * d[2].abs() / G).sqrt() } else { (2.0 * horiz / G).sqrt() };
    Some([d[0] / t, d[1] / t, d[2] / t + 0.5 * G * t])
}

pub fn free_throw(ball: P, vel: P, hoop: P, basket: bool) -> Option<f64> {
    let want = desired_velocity(ball, hoop)?;
    Some(0.5 * (-0.1 * dist2(vel, want)).exp() + 0.5 * align(vel, ball, hoop) + if basket { 1.0 } else { 0.0 })
}
