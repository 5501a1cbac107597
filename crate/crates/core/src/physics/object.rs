//! Free rigid objects and their collisions with static geometry.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::body::ObjectKinematics;
use crate::error::{Error, Result};
use crate::math::{Quat, Vec3, GRAVITY};

use super::terrain::WaveTerrain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Sphere { radius: f64 },
    /// Axis along the body x axis.
    Capsule { radius: f64, half_length: f64 },
    Box { extents: [f64; 3] },
}

impl Shape {
    /// Radius of the sphere used for static contacts: the sphere radius,
    /// the capsule radius, or half the smallest box extent.
    pub fn contact_radius(&self) -> f64 {
        match *self {
            Shape::Sphere { radius } | Shape::Capsule { radius, .. } => radius,
            Shape::Box { extents } => extents.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub shape: Shape,
    pub mass: f64,
    pub restitution: f64,
    pub friction: f64,
}

impl ObjectSpec {
    pub fn sphere(radius: f64, mass: f64, restitution: f64, friction: f64) -> Self {
        ObjectSpec {
            shape: Shape::Sphere { radius },
            mass,
            restitution,
            friction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims_ok = match self.shape {
            Shape::Sphere { radius } => radius > 0.0,
            Shape::Capsule {
                radius,
                half_length,
            } => radius > 0.0 && half_length > 0.0,
            Shape::Box { extents } => extents.iter().all(|&e| e > 0.0),
        };
        if !dims_ok || !(self.mass > 0.0) {
            return Err(Error::Config(format!(
                "object dimensions and mass must be positive: {self:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(Error::Config(format!(
                "restitution {} outside [0, 1]",
                self.restitution
            )));
        }
        if !(self.friction >= 0.0) {
            return Err(Error::Config(format!("friction {} is negative", self.friction)));
        }
        Ok(())
    }
}

/// Which agent joint holds an object, and where relative to that joint's
/// frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hold {
    pub agent: usize,
    pub joint: usize,
    pub offset: Vec3,
    /// Orientation relative to the joint frame.
    pub orient: Quat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimObject {
    pub spec: ObjectSpec,
    pub kin: ObjectKinematics,
    pub held: Option<Hold>,
    pub graspable: bool,
    /// Frozen objects (a landed javelin) no longer integrate.
    pub frozen: bool,
}

impl SimObject {
    pub fn new(spec: ObjectSpec, kin: ObjectKinematics) -> Self {
        SimObject {
            spec,
            kin,
            held: None,
            graspable: false,
            frozen: false,
        }
    }

    pub fn radius(&self) -> f64 {
        self.spec.shape.contact_radius()
    }

    /// Kinetic plus gravitational potential energy.
    pub fn energy(&self) -> f64 {
        self.spec.mass * (0.5 * self.kin.lin_vel.norm_squared() + GRAVITY * self.kin.pos.z)
    }

    /// World positions of the capsule end points, or the centre twice for
    /// other shapes.
    pub fn end_points(&self) -> (Vec3, Vec3) {
        match self.spec.shape {
            Shape::Capsule { half_length, .. } => {
                let axis = self.kin.orient * Vec3::x() * half_length;
                (self.kin.pos + axis, self.kin.pos - axis)
            }
            _ => (self.kin.pos, self.kin.pos),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceId {
    Ground,
    Terrain,
    Table,
    Net,
    Backboard,
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Multiplies the object's own restitution.
    pub restitution: f64,
    /// Deceleration applied to an object resting on this surface, as a
    /// fraction of g.
    pub rolling: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material {
            restitution: 1.0,
            rolling: 0.05,
        }
    }
}

/// One axis-aligned rectangular face. The object may touch it only from the
/// side `sign` points to along `axis`; `lo`/`hi` bound the two remaining axes
/// in increasing axis order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub axis: usize,
    pub coord: f64,
    pub sign: f64,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub material: Material,
    pub surface: SurfaceId,
}

impl Face {
    /// Unbounded floor at height `z`.
    pub fn floor(z: f64, surface: SurfaceId, material: Material) -> Self {
        Face {
            axis: 2,
            coord: z,
            sign: 1.0,
            lo: [f64::NEG_INFINITY; 2],
            hi: [f64::INFINITY; 2],
            material,
            surface,
        }
    }

    fn others(&self) -> (usize, usize) {
        match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    fn within(&self, p: &Vec3) -> bool {
        let (a, b) = self.others();
        p[a] >= self.lo[0] && p[a] <= self.hi[0] && p[b] >= self.lo[1] && p[b] <= self.hi[1]
    }

    fn normal(&self) -> Vec3 {
        let mut n = Vec3::zeros();
        n[self.axis] = self.sign;
        n
    }
}

/// An axis-aligned box contributes its six outward faces.
pub fn box_faces(min: Vec3, max: Vec3, surface: SurfaceId, material: Material) -> [Face; 6] {
    let mk = |axis: usize, coord: f64, sign: f64| {
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        Face {
            axis,
            coord,
            sign,
            lo: [min[a], min[b]],
            hi: [max[a], max[b]],
            material,
            surface,
        }
    };
    [
        mk(0, max.x, 1.0),
        mk(0, min.x, -1.0),
        mk(1, max.y, 1.0),
        mk(1, min.y, -1.0),
        mk(2, max.z, 1.0),
        mk(2, min.z, -1.0),
    ]
}

/// A horizontal bar the body must pass over (high-jump bar or hurdle top),
/// spanning `y_min..y_max` at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub x: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub top: f64,
    /// Vertical thickness below `top` that counts as touching.
    pub thickness: f64,
    pub hurdle: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StaticScene {
    pub faces: Vec<Face>,
    pub terrain: Option<(WaveTerrain, Material)>,
    pub bars: Vec<Bar>,
}

impl StaticScene {
    pub fn flat_ground(material: Material) -> Self {
        StaticScene {
            faces: vec![Face::floor(0.0, SurfaceId::Ground, material)],
            ..Default::default()
        }
    }

    /// Height of the supporting ground below `(x, y)`.
    pub fn ground_height(&self, x: f64, y: f64) -> f64 {
        match &self.terrain {
            Some((t, _)) => t.height(x, y),
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectContact {
    pub object: usize,
    pub surface: SurfaceId,
    pub point: Vec3,
    /// Approach speed along the normal before the impact.
    pub normal_speed: f64,
    /// Impulse over the substep, Newtons.
    pub force: f64,
}

pub const MAX_EVENTS: usize = 32;
pub type ContactEvents = ArrayVec<ObjectContact, MAX_EVENTS>;

const MAX_IMPACTS: usize = 6;
const REST_EPS: f64 = 1e-9;

#[inline]
fn flight(p: &Vec3, v: &Vec3, t: f64) -> (Vec3, Vec3) {
    (
        Vec3::new(p.x + v.x * t, p.y + v.y * t, p.z + v.z * t - 0.5 * GRAVITY * t * t),
        Vec3::new(v.x, v.y, v.z - GRAVITY * t),
    )
}

/// Earliest time in `(0, horizon]` at which a sphere of radius `r` on the
/// ballistic path `(p, v)` reaches `face` from its outer side.
fn face_toi(face: &Face, p: &Vec3, v: &Vec3, r: f64, horizon: f64) -> Option<f64> {
    let a = face.axis;
    let q = face.coord + face.sign * r;
    let gap = face.sign * (p[a] - q);
    if gap < -r {
        // Already behind the face: not reachable from outside.
        return None;
    }
    let t = if a == 2 {
        // ½(−g)t² + v t + (p − q) = 0, first root approaching along sign.
        let (qa, qb, qc) = (-0.5 * GRAVITY, v.z, p.z - q);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let r1 = (-qb + sq) / (2.0 * qa);
        let r2 = (-qb - sq) / (2.0 * qa);
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let approaching = |t: f64| face.sign * (v.z - GRAVITY * t) < 0.0;
        if lo > 0.0 && approaching(lo) {
            lo
        } else if hi > 0.0 && approaching(hi) {
            hi
        } else {
            return None;
        }
    } else {
        if face.sign * v[a] >= 0.0 || v[a] == 0.0 {
            return None;
        }
        (q - p[a]) / v[a]
    };
    if !(t > 0.0 && t <= horizon) {
        return None;
    }
    let (hit, _) = flight(p, v, t);
    face.within(&hit).then_some(t)
}

/// Reflects the normal component with restitution `e` and removes up to
/// μ(1+e)|v_n| of tangential speed.
#[inline]
fn reflect(v: &Vec3, n: &Vec3, e: f64, mu: f64) -> Vec3 {
    let vn = v.dot(n);
    if vn >= 0.0 {
        return *v;
    }
    let vt = v - n * vn;
    let vt_norm = vt.norm();
    let dv_t = (mu * (1.0 + e) * -vn).min(vt_norm);
    let vt_new = if vt_norm > 0.0 {
        vt * ((vt_norm - dv_t) / vt_norm)
    } else {
        vt
    };
    vt_new - n * (e * vn)
}

fn push_event(events: &mut ContactEvents, ev: ObjectContact) {
    let _ = events.try_push(ev);
}

/// Advances every free object by `dt` under gravity, resolving impacts with
/// `scene` at their exact time of impact. Impacts are appended to `events`.
pub fn step_objects(
    objects: &mut [SimObject],
    dt: f64,
    scene: &StaticScene,
    events: &mut ContactEvents,
) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step_objects needs dt > 0, got {dt}")));
    }
    for (idx, obj) in objects.iter_mut().enumerate() {
        if obj.held.is_some() || obj.frozen {
            continue;
        }
        step_one(idx, obj, dt, scene, events)?;
    }
    Ok(())
}

fn resting_face<'a>(scene: &'a StaticScene, p: &Vec3, v: &Vec3, r: f64, dt: f64) -> Option<&'a Face> {
    scene.faces.iter().find(|f| {
        f.axis == 2
            && f.sign > 0.0
            && (p.z - (f.coord + r)).abs() <= REST_EPS.max(1e-7)
            && v.z.abs() <= GRAVITY * dt
            && f.within(p)
    })
}

fn step_one(
    idx: usize,
    obj: &mut SimObject,
    dt: f64,
    scene: &StaticScene,
    events: &mut ContactEvents,
) -> Result<()> {
    let r = obj.radius();
    let e_obj = obj.spec.restitution;
    let mu = obj.spec.friction;
    let mass = obj.spec.mass;
    let mut p = obj.kin.pos;
    let mut v = obj.kin.lin_vel;

    if let Shape::Capsule { .. } = obj.spec.shape {
        return step_capsule(idx, obj, dt, scene, events);
    }

    if let Some(face) = resting_face(scene, &p, &v, r, dt) {
        // Supported: no vertical motion, rolling resistance on the rest.
        let rolling = face.material.rolling * GRAVITY * dt;
        let mut vt = Vec3::new(v.x, v.y, 0.0);
        let s = vt.norm();
        vt = if s > rolling { vt * ((s - rolling) / s) } else { Vec3::zeros() };
        let mut np = p + vt * dt;
        np.z = face.coord + r;
        if face.within(&np) {
            obj.kin.pos = np;
            obj.kin.lin_vel = vt;
            integrate_orientation(&mut obj.kin, dt);
            return Ok(());
        }
    }

    let mut rem = dt;
    for _ in 0..MAX_IMPACTS {
        let mut best: Option<(f64, &Face)> = None;
        for f in &scene.faces {
            if let Some(t) = face_toi(f, &p, &v, r, rem) {
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, f));
                }
            }
        }
        let Some((t, face)) = best else {
            let (np, nv) = flight(&p, &v, rem);
            p = np;
            v = nv;
            rem = 0.0;
            break;
        };
        let (hp, hv) = flight(&p, &v, t);
        let n = face.normal();
        let e = e_obj * face.material.restitution;
        let vn = hv.dot(&n);
        let mut nv = reflect(&hv, &n, e, mu);
        let hp_contact = hp;
        if nv.dot(&n) < GRAVITY * dt && face.axis == 2 && face.sign > 0.0 {
            // Too slow to leave the floor within a substep: come to rest on it.
            nv.z = 0.0;
        }
        push_event(
            events,
            ObjectContact {
                object: idx,
                surface: face.surface,
                point: hp_contact - n * r,
                normal_speed: -vn,
                force: mass * (1.0 + e) * -vn / dt,
            },
        );
        p = hp;
        v = nv;
        rem -= t;
        if v.z == 0.0 && face.axis == 2 && face.sign > 0.0 {
            p.z = face.coord + r;
            let mut np = p + Vec3::new(v.x, v.y, 0.0) * rem;
            np.z = p.z;
            p = np;
            rem = 0.0;
            break;
        }
        if rem <= 0.0 {
            break;
        }
    }
    if rem > 0.0 {
        let (np, nv) = flight(&p, &v, rem);
        p = np;
        v = nv;
    }

    if let Some((terrain, material)) = &scene.terrain {
        let (np, nv) = terrain_contact(idx, obj, terrain, material, p, v, dt, events);
        p = np;
        v = nv;
    }

    // Sanity: anything deeply inside a floor is a blow-up.
    for f in &scene.faces {
        if f.axis == 2 && f.sign > 0.0 && f.within(&p) && p.z < f.coord - 10.0 * r && obj.kin.pos.z >= f.coord {
            return Err(Error::Blowup(format!("object {idx} tunnelled {:.3} m into {:?}", f.coord - p.z, f.surface)));
        }
    }
    if !(p.iter().all(|x| x.is_finite()) && v.iter().all(|x| x.is_finite())) {
        return Err(Error::Blowup(format!("object {idx} state became non-finite")));
    }
    obj.kin.pos = p;
    obj.kin.lin_vel = v;
    integrate_orientation(&mut obj.kin, dt);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn terrain_contact(
    idx: usize,
    obj: &SimObject,
    terrain: &WaveTerrain,
    material: &Material,
    p: Vec3,
    v: Vec3,
    dt: f64,
    events: &mut ContactEvents,
) -> (Vec3, Vec3) {
    let r = obj.radius();
    let gap = |q: &Vec3| q.z - r - terrain.height(q.x, q.y);
    if gap(&p) >= 0.0 {
        return (p, v);
    }
    let depth = -gap(&p);
    if depth > 10.0 * r {
        // Left for the caller's blow-up check to report as non-finite.
        return (p, v);
    }
    let n = terrain.normal(p.x, p.y);
    let vn = v.dot(&n);
    let e = obj.spec.restitution * material.restitution;
    let mut nv = reflect(&v, &n, e, obj.spec.friction);
    let mut np = Vec3::new(p.x, p.y, terrain.height(p.x, p.y) + r);
    if nv.dot(&n) < GRAVITY * dt {
        // Settled onto the slope: keep the tangential part, apply rolling
        // resistance, and let gravity's slope component act next substep.
        nv -= n * nv.dot(&n);
        let s = nv.norm();
        let rolling = material.rolling * GRAVITY * dt;
        nv = if s > rolling { nv * ((s - rolling) / s) } else { Vec3::zeros() };
        np.z = terrain.height(np.x, np.y) + r;
    }
    if vn < 0.0 {
        push_event(
            events,
            ObjectContact {
                object: idx,
                surface: SurfaceId::Terrain,
                point: np - n * r,
                normal_speed: -vn,
                force: obj.spec.mass * (1.0 + e) * -vn / dt,
            },
        );
    }
    (np, nv)
}

/// Lifts an object that kinematic contact pushed slightly into a floor or
/// the terrain back onto the surface, removing the inward normal velocity.
pub fn project_out_of_floors(obj: &mut SimObject, scene: &StaticScene) {
    let r = obj.radius();
    let p = &mut obj.kin.pos;
    for f in &scene.faces {
        if f.axis == 2 && f.sign > 0.0 && f.within(p) && p.z < f.coord + r && p.z > f.coord - r {
            p.z = f.coord + r;
            obj.kin.lin_vel.z = obj.kin.lin_vel.z.max(0.0);
        }
    }
    if let Some((t, _)) = &scene.terrain {
        let h = t.height(p.x, p.y);
        if p.z < h + r {
            p.z = h + r;
            let n = t.normal(p.x, p.y);
            let vn = obj.kin.lin_vel.dot(&n);
            if vn < 0.0 {
                obj.kin.lin_vel -= n * vn;
            }
        }
    }
}

fn step_capsule(
    idx: usize,
    obj: &mut SimObject,
    dt: f64,
    scene: &StaticScene,
    events: &mut ContactEvents,
) -> Result<()> {
    let (np, nv) = flight(&obj.kin.pos, &obj.kin.lin_vel, dt);
    obj.kin.pos = np;
    obj.kin.lin_vel = nv;
    integrate_orientation(&mut obj.kin, dt);
    let (a, b) = obj.end_points();
    let low = if a.z < b.z { a } else { b };
    if low.z <= scene.ground_height(low.x, low.y) {
        let speed = obj.kin.lin_vel.norm();
        push_event(
            events,
            ObjectContact {
                object: idx,
                surface: SurfaceId::Ground,
                point: low,
                normal_speed: speed,
                force: obj.spec.mass * speed / dt,
            },
        );
        obj.kin.lin_vel = Vec3::zeros();
        obj.kin.ang_vel = Vec3::zeros();
        obj.frozen = true;
    }
    if !obj.kin.pos.iter().all(|x| x.is_finite()) {
        return Err(Error::Blowup(format!("object {idx} state became non-finite")));
    }
    Ok(())
}

fn integrate_orientation(kin: &mut ObjectKinematics, dt: f64) {
    let w = kin.ang_vel;
    if w.norm_squared() > 0.0 {
        kin.orient = Quat::from_scaled_axis(w * dt) * kin.orient;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballistics::{integrate_flight, LaunchState};

    const DT: f64 = 1.0 / 60.0;

    fn ball(z: f64, e: f64) -> SimObject {
        SimObject::new(
            ObjectSpec::sphere(0.02, 0.1, e, 0.2),
            ObjectKinematics::at(Vec3::new(0.0, 0.0, z)),
        )
    }

    fn run(objs: &mut [SimObject], scene: &StaticScene, steps: usize) -> Vec<ObjectContact> {
        let mut all = Vec::new();
        for _ in 0..steps {
            let mut ev = ContactEvents::new();
            step_objects(objs, DT, scene, &mut ev).unwrap();
            all.extend(ev);
        }
        all
    }

    #[test]
    fn spec_validation() {
        assert!(ObjectSpec::sphere(0.1, 1.0, 0.5, 0.1).validate().is_ok());
        assert!(ObjectSpec::sphere(0.0, 1.0, 0.5, 0.1).validate().is_err());
        assert!(ObjectSpec::sphere(0.1, 1.0, 1.5, 0.1).validate().is_err());
        assert!(ObjectSpec::sphere(0.1, -1.0, 0.5, 0.1).validate().is_err());
    }

    #[test]
    fn dropped_ball_rebounds_to_e_squared_height() {
        let scene = StaticScene::flat_ground(Material::default());
        // Centre starts 1 m above its resting height.
        let mut objs = [ball(1.02, 0.5)];
        let mut fell = false;
        let mut apex: f64 = 0.0;
        for _ in 0..120 {
            let mut ev = ContactEvents::new();
            step_objects(&mut objs, DT, &scene, &mut ev).unwrap();
            if !ev.is_empty() {
                fell = true;
            }
            if fell {
                apex = apex.max(objs[0].kin.pos.z - 0.02);
                if objs[0].kin.lin_vel.z < 0.0 && apex > 0.1 {
                    break;
                }
            }
        }
        assert!((apex - 0.25).abs() / 0.25 < 0.02, "apex {apex}");
    }

    #[test]
    fn inelastic_ball_comes_to_rest() {
        let scene = StaticScene::flat_ground(Material::default());
        let mut objs = [ball(0.5, 0.0)];
        run(&mut objs, &scene, 120);
        assert!(objs[0].kin.lin_vel.z.abs() < 1e-6);
        assert!((objs[0].kin.pos.z - 0.02).abs() < 1e-9);
    }

    #[test]
    fn free_flight_matches_closed_form() {
        let scene = StaticScene::default();
        let p0 = Vec3::new(0.0, 0.0, 1.0);
        let v0 = Vec3::new(3.0, -1.0, 6.0);
        let mut objs = [SimObject::new(
            ObjectSpec::sphere(0.02, 0.1, 0.5, 0.0),
            ObjectKinematics::with_velocity(p0, v0),
        )];
        run(&mut objs, &scene, 60);
        let oracle = integrate_flight(&LaunchState::new(p0, v0), 1e-3, 1000);
        let end = oracle.last().unwrap();
        assert!((objs[0].kin.pos - end.pos).norm() < 1e-3);
    }

    #[test]
    fn energy_never_increases_across_impacts() {
        let scene = StaticScene {
            faces: {
                let mut f = vec![Face::floor(0.0, SurfaceId::Ground, Material::default())];
                f.extend(box_faces(
                    Vec3::new(2.0, -1.0, 0.0),
                    Vec3::new(2.1, 1.0, 1.5),
                    SurfaceId::Wall,
                    Material::default(),
                ));
                f
            },
            ..Default::default()
        };
        for e in [0.0, 0.3, 0.8, 1.0] {
            let mut objs = [SimObject::new(
                ObjectSpec::sphere(0.05, 0.4, e, 0.3),
                ObjectKinematics::with_velocity(Vec3::new(0.0, 0.0, 1.0), Vec3::new(4.0, 0.5, 2.0)),
            )];
            let mut prev = objs[0].energy();
            for _ in 0..300 {
                let mut ev = ContactEvents::new();
                step_objects(&mut objs, DT, &scene, &mut ev).unwrap();
                let now = objs[0].energy();
                assert!(now <= prev + 1e-6 * prev.abs().max(1.0), "e={e}: {prev} -> {now}");
                prev = now;
            }
        }
    }

    #[test]
    fn wall_reflects_horizontal_motion() {
        let mut faces = vec![];
        faces.extend(box_faces(
            Vec3::new(1.0, -5.0, -5.0),
            Vec3::new(1.2, 5.0, 5.0),
            SurfaceId::Net,
            Material::default(),
        ));
        let scene = StaticScene {
            faces,
            ..Default::default()
        };
        let mut objs = [SimObject::new(
            ObjectSpec::sphere(0.05, 0.4, 1.0, 0.0),
            ObjectKinematics::with_velocity(Vec3::new(0.0, 0.0, 2.0), Vec3::new(5.0, 0.0, 0.0)),
        )];
        let ev = run(&mut objs, &scene, 20);
        assert!(ev.iter().any(|c| c.surface == SurfaceId::Net));
        assert!(objs[0].kin.lin_vel.x < 0.0);
        assert!(objs[0].kin.pos.x < 0.95 + 1e-9);
    }

    #[test]
    fn bounded_table_lets_ball_fall_past_its_edge() {
        let table = Face {
            axis: 2,
            coord: 0.76,
            sign: 1.0,
            lo: [-1.37, -0.76],
            hi: [1.37, 0.76],
            material: Material::default(),
            surface: SurfaceId::Table,
        };
        let scene = StaticScene {
            faces: vec![table, Face::floor(0.0, SurfaceId::Ground, Material::default())],
            ..Default::default()
        };
        let mut objs = [ball(1.5, 0.9)];
        objs[0].kin.pos.x = 3.0;
        let ev = run(&mut objs, &scene, 40);
        assert_eq!(ev[0].surface, SurfaceId::Ground);
    }

    #[test]
    fn capsule_sticks_on_landing() {
        let scene = StaticScene::flat_ground(Material::default());
        let mut jav = SimObject::new(
            ObjectSpec {
                shape: Shape::Capsule {
                    radius: 0.015,
                    half_length: 1.35,
                },
                mass: 0.8,
                restitution: 0.0,
                friction: 1.0,
            },
            ObjectKinematics::with_velocity(Vec3::new(0.0, 0.0, 2.0), Vec3::new(20.0, 0.0, 5.0)),
        );
        jav.kin.orient = Quat::from_euler_angles(0.0, -0.3, 0.0);
        let mut objs = [jav];
        let ev = run(&mut objs, &scene, 200);
        assert_eq!(ev.len(), 1);
        assert!(objs[0].frozen);
        assert_eq!(objs[0].kin.lin_vel, Vec3::zeros());
    }

    #[test]
    fn terrain_bounce_stays_above_surface() {
        let t = WaveTerrain::new(0.5, 8.0, 0.0, 0.0);
        let scene = StaticScene {
            terrain: Some((t, Material::default())),
            ..Default::default()
        };
        let mut objs = [SimObject::new(
            ObjectSpec::sphere(0.021, 0.046, 0.5, 0.3),
            ObjectKinematics::with_velocity(Vec3::new(0.0, 0.0, 3.0), Vec3::new(8.0, 1.0, 4.0)),
        )];
        let ev = run(&mut objs, &scene, 600);
        assert!(ev.iter().any(|c| c.surface == SurfaceId::Terrain));
        let p = objs[0].kin.pos;
        assert!(p.z - 0.021 >= t.height(p.x, p.y) - 1e-6);
    }

    #[test]
    fn bad_dt_is_rejected() {
        let mut objs = [ball(1.0, 0.5)];
        let mut ev = ContactEvents::new();
        assert!(step_objects(&mut objs, 0.0, &StaticScene::default(), &mut ev).is_err());
    }
}
