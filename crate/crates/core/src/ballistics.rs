//! Drag-free projectile prediction.
//!
//! The closed forms here feed the dense landing rewards (golf, tennis, table
//! tennis, penalty kick) and the free-throw desired velocity. Simulated
//! flight in [`crate::physics`] uses the same drag-free model, so the
//! predictions agree with what actually happens to the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{Vec2, Vec3, GRAVITY};

/// Initial conditions of a projectile. `gravity` is a positive magnitude
/// acting along −z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchState {
    pub p0: Vec3,
    pub v0: Vec3,
    pub gravity: f64,
}

impl LaunchState {
    pub fn new(p0: Vec3, v0: Vec3) -> Self {
        LaunchState {
            p0,
            v0,
            gravity: GRAVITY,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.p0.iter().chain(self.v0.iter()).all(|v| v.is_finite())
            && self.gravity.is_finite())
        {
            return Err(Error::InvalidState("non-finite launch state".into()));
        }
        if !(self.gravity > 0.0) {
            return Err(Error::Domain(format!(
                "gravity must be positive, got {}",
                self.gravity
            )));
        }
        Ok(())
    }
}

/// Time until the descending crossing of the plane z = h, if it lies in the
/// future.
fn descending_crossing_time(launch: &LaunchState, h: f64) -> Option<f64> {
    let g = launch.gravity;
    let vz = launch.v0.z;
    let disc = vz * vz + 2.0 * g * (launch.p0.z - h);
    if disc < 0.0 {
        return None;
    }
    let t = (vz + disc.sqrt()) / g;
    (t >= 0.0).then_some(t)
}

/// Descending crossing of the plane z = `h` without validation; `None` when
/// the trajectory never comes down through it. Never allocates.
pub fn descending_crossing(launch: &LaunchState, h: f64) -> Option<Vec2> {
    let t = descending_crossing_time(launch, h)?;
    Some(Vec2::new(launch.p0.x + launch.v0.x * t, launch.p0.y + launch.v0.y * t))
}

/// Where a projectile launched from `launch` meets the ground plane z = 0.
///
/// Flight time is the positive root of `z0 + v0z·T − ½gT² = 0`.
pub fn predict_land_ground(launch: &LaunchState) -> Result<Vec2> {
    launch.check()?;
    if launch.p0.z < 0.0 {
        return Err(Error::Domain(format!(
            "launch height {} is below the ground",
            launch.p0.z
        )));
    }
    let t = descending_crossing_time(launch, 0.0).expect("z0 >= 0 always lands");
    Ok(Vec2::new(
        launch.p0.x + launch.v0.x * t,
        launch.p0.y + launch.v0.y * t,
    ))
}

/// Where a projectile crosses the plane z = `h` on the way down. Fails with
/// [`Error::NoSolution`] when the trajectory never comes down through that
/// plane.
pub fn predict_land_height(launch: &LaunchState, h: f64) -> Result<Vec2> {
    launch.check()?;
    if !h.is_finite() {
        return Err(Error::InvalidState("non-finite plane height".into()));
    }
    let t = descending_crossing_time(launch, h).ok_or_else(|| {
        Error::NoSolution(format!("trajectory never descends through z = {h}"))
    })?;
    Ok(Vec2::new(
        launch.p0.x + launch.v0.x * t,
        launch.p0.y + launch.v0.y * t,
    ))
}

/// Vertical-velocity convention for [`desired_throw_velocity_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrowConvention {
    /// Vertical component chosen so the drag-free flight passes through the
    /// goal after the reach time.
    #[default]
    PassThrough,
    /// `v_z = ((p_ball − p_goal)_z + ½gT²) / T`, exactly as printed in the
    /// original reward description. Does not reach a goal above the ball.
    Literal,
}

/// Launch velocity of magnitude `speed` from `p0` that comes down through
/// the plane z = `h` at `land`, choosing the flatter of the two arcs.
/// `None` when `speed` cannot reach that far or `p0` is below the plane.
pub fn launch_to_land(p0: &Vec3, land: &Vec2, h: f64, speed: f64, g: f64) -> Option<Vec3> {
    if !(speed > 0.0 && g > 0.0) || p0.z < h {
        return None;
    }
    let d = land - p0.xy();
    let dist = d.norm();
    if dist < 1e-9 {
        return None;
    }
    let range = |th: f64| {
        let (s, c) = th.sin_cos();
        let vz = speed * s;
        let t = (vz + (vz * vz + 2.0 * g * (p0.z - h)).sqrt()) / g;
        speed * c * t
    };
    // Range is unimodal in the elevation angle.
    let (mut lo, mut hi) = (-1.5f64, 1.5f64);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if range(m1) < range(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let best = 0.5 * (lo + hi);
    if range(best) < dist {
        return None;
    }
    let (mut a, mut b) = (-1.5f64, best);
    if range(a) > dist {
        return None;
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if range(m) < dist {
            a = m;
        } else {
            b = m;
        }
    }
    let th = 0.5 * (a + b);
    let dir = d / dist;
    Some(Vec3::new(dir.x * speed * th.cos(), dir.y * speed * th.cos(), speed * th.sin()))
}

/// Reach time used by the throw solver: `sqrt(2·|Δz| / g)`. When the goal is
/// level with the ball this degenerates to zero; the solver then falls back
/// to the 45° flight time for the horizontal range.
pub fn reach_time(p_ball: &Vec3, p_goal: &Vec3, g: f64) -> f64 {
    let dz = (p_ball.z - p_goal.z).abs();
    if dz > 1e-9 {
        (2.0 * dz / g).sqrt()
    } else {
        let range = (p_goal - p_ball).xy().norm();
        (2.0 * range / g).sqrt()
    }
}

/// Launch velocity that carries a ball from `p_ball` through `p_goal`.
pub fn desired_throw_velocity(p_ball: &Vec3, p_goal: &Vec3, g: f64) -> Result<Vec3> {
    desired_throw_velocity_with(p_ball, p_goal, g, ThrowConvention::PassThrough)
}

pub fn desired_throw_velocity_with(
    p_ball: &Vec3,
    p_goal: &Vec3,
    g: f64,
    convention: ThrowConvention,
) -> Result<Vec3> {
    if !(p_ball.iter().chain(p_goal.iter()).all(|v| v.is_finite()) && g.is_finite()) {
        return Err(Error::InvalidState("non-finite throw input".into()));
    }
    if !(g > 0.0) {
        return Err(Error::Domain(format!("gravity must be positive, got {g}")));
    }
    let delta = p_goal - p_ball;
    let dxy = delta.xy();
    if dxy.norm() <= 1e-12 && delta.z.abs() <= 1e-12 {
        return Err(Error::DegenerateTarget(
            "ball and goal coincide".into(),
        ));
    }
    let t = reach_time(p_ball, p_goal, g);
    let vxy = dxy / t;
    let vz = match convention {
        ThrowConvention::PassThrough => (delta.z + 0.5 * g * t * t) / t,
        ThrowConvention::Literal => (-delta.z + 0.5 * g * t * t) / t,
    };
    Ok(Vec3::new(vxy.x, vxy.y, vz))
}

/// One sample of a numerically integrated flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightSample {
    pub t: f64,
    pub pos: Vec3,
    pub vel: Vec3,
}

/// Single classical Runge–Kutta step of `ẍ = (0, 0, −g)`.
pub fn rk4_step(pos: Vec3, vel: Vec3, g: f64, dt: f64) -> (Vec3, Vec3) {
    let acc = Vec3::new(0.0, 0.0, -g);
    let k1x = vel;
    let k1v = acc;
    let k2x = vel + k1v * (dt / 2.0);
    let k2v = acc;
    let k3x = vel + k2v * (dt / 2.0);
    let k3v = acc;
    let k4x = vel + k3v * dt;
    let k4v = acc;
    let pos = pos + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
    let vel = vel + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
    (pos, vel)
}

/// RK4 integration of free flight. Returns `steps + 1` samples starting at
/// t = 0. Used as a reference for the closed forms; never on the stepping
/// path.
pub fn integrate_flight(launch: &LaunchState, dt: f64, steps: usize) -> Vec<FlightSample> {
    let mut out = Vec::with_capacity(steps + 1);
    let (mut pos, mut vel) = (launch.p0, launch.v0);
    out.push(FlightSample { t: 0.0, pos, vel });
    for i in 1..=steps {
        (pos, vel) = rk4_step(pos, vel, launch.gravity, dt);
        out.push(FlightSample {
            t: i as f64 * dt,
            pos,
            vel,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: march RK4 until the trajectory passes downward
    /// through z = h, then bisect inside the bracketing step with sub-steps.
    fn rk4_crossing(launch: &LaunchState, h: f64) -> Option<Vec2> {
        let dt = 1e-3;
        let (mut pos, mut vel) = (launch.p0, launch.v0);
        for _ in 0..200_000 {
            let (np, nv) = rk4_step(pos, vel, launch.gravity, dt);
            if pos.z >= h && np.z < h {
                let (mut lo, mut hi) = (0.0, dt);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let (mp, _) = rk4_step(pos, vel, launch.gravity, mid);
                    if mp.z > h {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (fp, _) = rk4_step(pos, vel, launch.gravity, 0.5 * (lo + hi));
                return Some(Vec2::new(fp.x, fp.y));
            }
            pos = np;
            vel = nv;
            if vel.z < 0.0 && pos.z < h {
                return None;
            }
        }
        None
    }

    /// Time at which RK4 flight gets closest to `goal`, and that distance.
    fn rk4_closest_approach(p: Vec3, v: Vec3, goal: Vec3) -> f64 {
        let launch = LaunchState::new(p, v);
        let samples = integrate_flight(&launch, 1e-4, 60_000);
        let (i, _) = samples
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s.pos - goal).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        // Refine within the neighbouring samples.
        let start = samples[i.saturating_sub(1)];
        let mut best = f64::INFINITY;
        for k in 0..=2000 {
            let (pos, _) = rk4_step(start.pos, start.vel, launch.gravity, k as f64 * 1e-7);
            best = best.min((pos - goal).norm());
        }
        best
    }

    #[test]
    fn ground_landing_example_matches_oracle() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(10.0, 0.0, 0.0));
        let land = predict_land_ground(&launch).unwrap();
        let oracle = rk4_crossing(&launch, 0.0).unwrap();
        assert!((land - oracle).norm() < 1e-3);
        assert!((land.x - 4.5152).abs() < 1e-4);
        assert_eq!(land.y, 0.0);
    }

    #[test]
    fn zero_flight_time_lands_in_place() {
        let launch = LaunchState::new(Vec3::new(3.0, 2.0, 0.0), Vec3::zeros());
        assert_eq!(predict_land_ground(&launch).unwrap(), Vec2::new(3.0, 2.0));
    }

    #[test]
    fn symmetric_parabola_range() {
        let (v, w) = (7.0, 4.0);
        let launch = LaunchState::new(Vec3::zeros(), Vec3::new(v, 0.0, w));
        let land = predict_land_ground(&launch).unwrap();
        assert!((land.x - 2.0 * v * w / GRAVITY).abs() < 1e-12);
    }

    #[test]
    fn below_ground_is_domain_error() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, -0.1), Vec3::zeros());
        assert!(matches!(predict_land_ground(&launch), Err(Error::Domain(_))));
        let launch = LaunchState::new(Vec3::new(f64::NAN, 0.0, 1.0), Vec3::zeros());
        assert!(matches!(
            predict_land_ground(&launch),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn table_height_example() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(2.0, 0.0, 0.0));
        let land = predict_land_height(&launch, 0.76).unwrap();
        let t = (2.0 * 0.24 / GRAVITY).sqrt();
        assert!((t - 0.2212).abs() < 1e-4);
        assert!((land.x - 2.0 * t).abs() < 1e-12);
        assert!((land.x - 0.4424).abs() < 1e-4);
        let oracle = rk4_crossing(&launch, 0.76).unwrap();
        assert!((land - oracle).norm() < 1e-3);
    }

    #[test]
    fn plane_at_launch_height_uses_later_crossing() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 0.76), Vec3::new(1.0, 0.0, 3.0));
        let land = predict_land_height(&launch, 0.76).unwrap();
        assert!((land.x - 2.0 * 3.0 / GRAVITY).abs() < 1e-12);
    }

    #[test]
    fn apex_below_plane_has_no_solution() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 0.5), Vec3::new(1.0, 0.0, 0.0));
        assert!(matches!(
            predict_land_height(&launch, 0.76),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn height_zero_equals_ground_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let launch = LaunchState::new(
                Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(0.0..3.0)),
                Vec3::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)),
            );
            assert_eq!(
                predict_land_height(&launch, 0.0).unwrap(),
                predict_land_ground(&launch).unwrap()
            );
        }
    }

    #[test]
    fn closed_forms_agree_with_rk4_on_random_launches() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let dir = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let speed = rng.random_range(0.0..40.0);
            let v0 = if dir.norm() > 1e-6 { dir.normalize() * speed } else { Vec3::zeros() };
            let launch = LaunchState::new(
                Vec3::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(0.0..3.0)),
                v0,
            );
            let ground = predict_land_ground(&launch).unwrap();
            if launch.p0.z > 0.0 {
                let oracle = rk4_crossing(&launch, 0.0).unwrap();
                assert!((ground - oracle).norm() < 1e-3, "{launch:?}");
            }
            let h = rng.random_range(0.0..2.0);
            match (predict_land_height(&launch, h), rk4_crossing(&launch, h)) {
                (Ok(a), Some(b)) => assert!((a - b).norm() < 1e-3, "{launch:?} h={h}"),
                (Err(Error::NoSolution(_)), None) => {}
                (a, b) => {
                    // Tangent cases can disagree on existence only when the
                    // apex grazes the plane.
                    let apex = launch.p0.z + launch.v0.z.max(0.0).powi(2) / (2.0 * GRAVITY);
                    assert!((apex - h).abs() < 1e-6 || (launch.p0.z - h).abs() < 1e-9, "{a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn free_throw_example() {
        let ball = Vec3::new(4.5, 0.0, 2.0);
        let goal = Vec3::new(0.0, 0.0, 3.0);
        let t = reach_time(&ball, &goal, GRAVITY);
        assert!((t - 0.4515).abs() < 1e-3);
        let v = desired_throw_velocity(&ball, &goal, GRAVITY).unwrap();
        assert!((v.xy().norm() - 9.967).abs() < 1e-3);
        assert!(v.x < 0.0);
        assert!(rk4_closest_approach(ball, v, goal) < 1e-3);
    }

    #[test]
    fn goal_directly_above_reaches_apex() {
        let ball = Vec3::new(1.0, 1.0, 2.0);
        let goal = Vec3::new(1.0, 1.0, 3.0);
        let v = desired_throw_velocity(&ball, &goal, GRAVITY).unwrap();
        assert_eq!(v.xy().norm(), 0.0);
        // 1-D kinematics: apex height v²/2g equals the rise.
        assert!((v.z * v.z / (2.0 * GRAVITY) - 1.0).abs() < 1e-12);
        assert!(rk4_closest_approach(ball, v, goal) < 1e-3);
    }

    #[test]
    fn level_goal_still_passes_through() {
        let ball = Vec3::new(0.0, 0.0, 1.0);
        for d in [0.5, 3.0, 9.0] {
            let goal = Vec3::new(d, 0.0, 1.0);
            let v = desired_throw_velocity(&ball, &goal, GRAVITY).unwrap();
            assert!(rk4_closest_approach(ball, v, goal) < 1e-3);
        }
    }

    #[test]
    fn launch_to_land_hits_the_requested_point() {
        let p0 = Vec3::new(11.0, 1.0, 1.2);
        let land = Vec2::new(-6.0, -2.0);
        let v = launch_to_land(&p0, &land, 0.0, 20.0, GRAVITY).unwrap();
        assert!((v.norm() - 20.0).abs() < 1e-9);
        let got = predict_land_ground(&LaunchState::new(p0, v)).unwrap();
        assert!((got - land).norm() < 1e-6);
        let oracle = rk4_crossing(&LaunchState::new(p0, v), 0.0).unwrap();
        assert!((oracle - land).norm() < 1e-3);
        // Table plane.
        let p0 = Vec3::new(1.8, 0.0, 1.0);
        let land = Vec2::new(-0.7, 0.3);
        let v = launch_to_land(&p0, &land, 0.76, 5.0, GRAVITY).unwrap();
        let got = predict_land_height(&LaunchState::new(p0, v), 0.76).unwrap();
        assert!((got - land).norm() < 1e-6);
        assert!(launch_to_land(&p0, &Vec2::new(-40.0, 0.0), 0.76, 5.0, GRAVITY).is_none());
        assert!(launch_to_land(&Vec3::new(0.0, 0.0, 0.5), &land, 0.76, 5.0, GRAVITY).is_none());
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert!(matches!(
            desired_throw_velocity(&p, &p, GRAVITY),
            Err(Error::DegenerateTarget(_))
        ));
    }

    #[test]
    fn literal_convention_stalls_one_metre_below() {
        let ball = Vec3::new(4.5, 0.0, 2.0);
        let goal = Vec3::new(0.0, 0.0, 3.0);
        let v = desired_throw_velocity_with(&ball, &goal, GRAVITY, ThrowConvention::Literal).unwrap();
        assert!(v.z.abs() < 1e-12);
        assert!(rk4_closest_approach(ball, v, goal) > 0.5);
    }

    #[test]
    fn free_fall_matches_closed_form() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 5.0), Vec3::zeros());
        for s in integrate_flight(&launch, 0.01, 100) {
            let z = 5.0 - 0.5 * GRAVITY * s.t * s.t;
            assert!((s.pos.z - z).abs() < 1e-9);
        }
    }

    #[test]
    fn rk4_conserves_energy() {
        let launch = LaunchState::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(3.0, -2.0, 6.0));
        let energy = |s: &FlightSample| 0.5 * s.vel.norm_squared() + GRAVITY * s.pos.z;
        let samples = integrate_flight(&launch, 1e-3, 1000);
        let e0 = energy(&samples[0]);
        for s in &samples {
            assert!((energy(s) - e0).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn throw_passes_through_goal(
            bx in -5.0..5.0f64, by in -5.0..5.0f64, bz in 0.5..2.5f64,
            dx in -7.0..7.0f64, dy in -7.0..7.0f64, dz in -2.0..2.0f64,
        ) {
            prop_assume!((dx * dx + dy * dy).sqrt() <= 10.0);
            prop_assume!(dx.abs() + dy.abs() + dz.abs() > 1e-3);
            let ball = Vec3::new(bx, by, bz);
            let goal = ball + Vec3::new(dx, dy, dz);
            let v = desired_throw_velocity(&ball, &goal, GRAVITY).unwrap();
            prop_assert!(rk4_closest_approach(ball, v, goal) < 1e-3);
        }

        #[test]
        fn predictors_are_equivariant(
            px in -5.0..5.0f64, py in -5.0..5.0f64, pz in 0.0..3.0f64,
            vx in -20.0..20.0f64, vy in -20.0..20.0f64, vz in -20.0..20.0f64,
            yaw in -3.1..3.1f64, tx in -30.0..30.0f64, ty in -30.0..30.0f64,
        ) {
            use crate::math::{rotate_z, rotate_z2};
            let a = LaunchState::new(Vec3::new(px, py, pz), Vec3::new(vx, vy, vz));
            let moved_p = rotate_z(&a.p0, yaw) + Vec3::new(tx, ty, 0.0);
            let b = LaunchState::new(moved_p, rotate_z(&a.v0, yaw));
            let la = predict_land_ground(&a).unwrap();
            let lb = predict_land_ground(&b).unwrap();
            let expect = rotate_z2(&la, yaw) + Vec2::new(tx, ty);
            prop_assert!((lb - expect).norm() < 1e-9);
        }
    }
}
