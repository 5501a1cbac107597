//! Agents, objects and static geometry stepped together at the policy rate.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::body::{BodyState, ContactPair, ContactSet};
use crate::error::{Error, Result};
use crate::math::{matrix_from_rot6, Quat, Vec3, GRAVITY};

use super::contact::{kinematic_impulse, plane_crossing, strike, sweep_sphere, Implement, ImplementShape};
use super::object::{project_out_of_floors, step_objects, ContactEvents, Hold, SimObject, StaticScene};
use super::proxy::{channel, DynamicsBackend};

pub const SIM_DT: f64 = 1.0 / 60.0;
pub const POLICY_DT: f64 = 1.0 / 30.0;
pub const SUBSTEPS: usize = 2;

const MAX_OBJECTS: usize = 8;
const MAX_IMPLEMENTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    /// Mass behind a strike when converting approach speed to force.
    pub strike_mass: f64,
    /// Radius of the spheres around target bodies that count as touched.
    pub target_radius: f64,
    /// Hand-to-object centre distance (beyond the object radius) within
    /// which a grip takes hold.
    pub grasp_radius: f64,
    /// Joint thickness used for bar and hurdle contact.
    pub joint_radius: f64,
    /// Joints this close to the ground carry body weight.
    pub ground_contact: f64,
    pub body_mass: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            strike_mass: 0.5,
            target_radius: 0.1,
            grasp_radius: 0.15,
            joint_radius: 0.02,
            ground_contact: 0.05,
            body_mass: 70.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub backend: Box<dyn DynamicsBackend>,
    pub implements: Vec<Implement>,
    pub contacts: ContactSet,
    prev_pos: Vec<Vec3>,
}

impl Agent {
    pub fn state(&self) -> &BodyState {
        self.backend.state()
    }
}

/// Which geometry pairs the world checks each substep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interaction {
    ImplementObject {
        agent: usize,
        implement: usize,
        object: usize,
    },
    /// Spheres of `radius` at the given joints (feet, hands) against an
    /// object.
    JointsObject {
        agent: usize,
        joints: [usize; 2],
        radius: f64,
        restitution: f64,
        object: usize,
        pair: ContactPair,
    },
    Strike {
        attacker: usize,
        implement: usize,
        defender: usize,
    },
    Bars {
        agent: usize,
    },
    /// Grip channel picks up / releases `object` with the right hand.
    Grasp {
        agent: usize,
        object: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEvent {
    pub agent: usize,
    pub object: usize,
    pub pair: ContactPair,
    pub point: Vec3,
    pub force: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrikeEvent {
    pub attacker: usize,
    pub defender: usize,
    pub joint: usize,
    pub force: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarCrossing {
    pub agent: usize,
    pub bar: usize,
    pub joint: usize,
    pub point: Vec3,
    pub touched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseEvent {
    pub agent: usize,
    pub object: usize,
}

/// Everything that happened during the last control step.
#[derive(Debug, Clone, Default)]
pub struct StepEvents {
    pub objects: ContactEvents,
    pub hits: ArrayVec<HitEvent, 16>,
    pub strikes: ArrayVec<StrikeEvent, 8>,
    pub bars: ArrayVec<BarCrossing, 64>,
    pub releases: ArrayVec<ReleaseEvent, 4>,
}

impl StepEvents {
    fn clear(&mut self) {
        self.objects.clear();
        self.hits.clear();
        self.strikes.clear();
        self.bars.clear();
        self.releases.clear();
    }
}

#[derive(Debug, Clone)]
pub struct World {
    pub agents: Vec<Agent>,
    pub objects: Vec<SimObject>,
    pub scene: StaticScene,
    pub interactions: Vec<Interaction>,
    pub events: StepEvents,
    pub config: WorldConfig,
    pub time: f64,
}

impl World {
    pub fn new(scene: StaticScene, config: WorldConfig) -> Self {
        World {
            agents: Vec::new(),
            objects: Vec::new(),
            scene,
            interactions: Vec::new(),
            events: StepEvents::default(),
            config,
            time: 0.0,
        }
    }

    pub fn add_agent(&mut self, backend: Box<dyn DynamicsBackend>, implements: Vec<Implement>) -> Result<usize> {
        if implements.len() > MAX_IMPLEMENTS {
            return Err(Error::Config(format!("at most {MAX_IMPLEMENTS} implements per agent")));
        }
        let n = backend.skeleton().joint_count;
        if let Some(bad) = implements.iter().find(|i| i.joint >= n) {
            return Err(Error::Config(format!("implement joint {} out of range", bad.joint)));
        }
        self.agents.push(Agent {
            backend,
            implements,
            contacts: ContactSet::new(n),
            prev_pos: vec![Vec3::zeros(); n],
        });
        Ok(self.agents.len() - 1)
    }

    pub fn add_object(&mut self, obj: SimObject) -> Result<usize> {
        obj.spec.validate()?;
        if self.objects.len() >= MAX_OBJECTS {
            return Err(Error::Config(format!("at most {MAX_OBJECTS} objects per world")));
        }
        self.objects.push(obj);
        Ok(self.objects.len() - 1)
    }

    pub fn add_interaction(&mut self, i: Interaction) -> Result<()> {
        let na = self.agents.len();
        let no = self.objects.len();
        let ok = match i {
            Interaction::ImplementObject {
                agent,
                implement,
                object,
            } => agent < na && object < no && implement < self.agents[agent].implements.len(),
            Interaction::JointsObject { agent, object, .. } | Interaction::Grasp { agent, object } => {
                agent < na && object < no
            }
            Interaction::Strike {
                attacker,
                implement,
                defender,
            } => attacker < na && defender < na && implement < self.agents[attacker].implements.len(),
            Interaction::Bars { agent } => agent < na,
        };
        if !ok {
            return Err(Error::Config(format!("interaction refers to missing geometry: {i:?}")));
        }
        self.interactions.push(i);
        Ok(())
    }

    /// Total action length across agents.
    pub fn action_len(&self) -> usize {
        self.agents.iter().map(|a| a.backend.skeleton().action_dim).sum()
    }

    /// Resets agent `i` to `state` and clears its contacts.
    pub fn reset_agent(&mut self, i: usize, state: &BodyState) -> Result<()> {
        let a = &mut self.agents[i];
        a.backend.reset(state)?;
        a.contacts.reset();
        Ok(())
    }

    /// Puts `object` into `agent`'s right hand at its current pose relative
    /// to the hand.
    pub fn attach(&mut self, object: usize, agent: usize) {
        let st = self.agents[agent].state();
        let joint = self.agents[agent].backend.skeleton().end_effectors.right_hand;
        let rot = matrix_from_rot6(&st.joint_rot[joint]).unwrap_or_else(nalgebra::Matrix3::identity);
        let rq = Quat::from_matrix(&rot);
        let obj = &mut self.objects[object];
        let offset = rot.transpose() * (obj.kin.pos - st.joint_pos[joint]);
        obj.held = Some(Hold {
            agent,
            joint,
            offset,
            orient: rq.inverse() * obj.kin.orient,
        });
        obj.frozen = false;
    }

    /// True when the agent's root is below 0.15 m or its head or torso is
    /// touching the ground.
    pub fn fallen(&self, agent: usize) -> bool {
        let st = self.agents[agent].state();
        let sk = self.agents[agent].backend.skeleton();
        let above = |j: usize| {
            let p = st.joint_pos[j];
            p.z - self.scene.ground_height(p.x, p.y)
        };
        if above(0) < 0.15 {
            return true;
        }
        let head = sk.end_effectors.head;
        std::iter::once(head)
            .chain(sk.target_bodies[2..].iter().copied())
            .any(|j| above(j) < self.config.target_radius)
    }
}

/// Advances the world by one policy step: validates the flat `actions`
/// (agents in order), then runs exactly [`SUBSTEPS`] substeps of [`SIM_DT`].
pub fn control_step(world: &mut World, actions: &[f32]) -> Result<()> {
    let need = world.action_len();
    if actions.len() != need {
        return Err(Error::InvalidAction(format!(
            "expected {need} action values, got {}",
            actions.len()
        )));
    }
    if let Some(i) = actions.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidAction(format!("non-finite action at index {i}")));
    }
    world.events.clear();
    for a in &mut world.agents {
        a.contacts.begin_step();
    }
    for _ in 0..SUBSTEPS {
        substep(world, actions)?;
    }
    Ok(())
}

fn implement_centers(agent: &Agent) -> ArrayVec<Vec3, MAX_IMPLEMENTS> {
    agent
        .implements
        .iter()
        .map(|i| i.pose(agent.state()).center)
        .collect()
}

fn substep(world: &mut World, actions: &[f32]) -> Result<()> {
    let dt = SIM_DT;
    let mut prev_impl: ArrayVec<ArrayVec<Vec3, MAX_IMPLEMENTS>, 2> = ArrayVec::new();
    for (k, a) in world.agents.iter_mut().enumerate() {
        a.prev_pos.copy_from_slice(&a.backend.state().joint_pos);
        if k < 2 {
            prev_impl.push(implement_centers(a));
        }
    }
    let mut offset = 0;
    for a in &mut world.agents {
        let dim = a.backend.skeleton().action_dim;
        a.backend.step(&actions[offset..offset + dim], 1, dt, &world.scene)?;
        if !a.backend.state().is_finite() {
            return Err(Error::Blowup("agent state became non-finite".into()));
        }
        offset += dim;
    }

    grasp(world, actions);

    let prev_obj: ArrayVec<Vec3, MAX_OBJECTS> = world.objects.iter().map(|o| o.kin.pos).collect();
    step_objects(&mut world.objects, dt, &world.scene, &mut world.events.objects)?;

    for idx in 0..world.interactions.len() {
        match world.interactions[idx] {
            Interaction::ImplementObject {
                agent,
                implement,
                object,
            } => {
                let imp = world.agents[agent].implements[implement];
                let c0 = prev_impl.get(agent).and_then(|v| v.get(implement)).copied();
                kinematic_contact(world, agent, &imp, c0, object, prev_obj[object], dt);
            }
            Interaction::JointsObject {
                agent,
                joints,
                radius,
                restitution,
                object,
                pair,
            } => {
                for j in joints {
                    let imp = Implement {
                        shape: ImplementShape::Sphere { radius },
                        joint: j,
                        offset: [0.0; 3],
                        restitution,
                        pair,
                    };
                    let c0 = Some(world.agents[agent].prev_pos[j]);
                    kinematic_contact(world, agent, &imp, c0, object, prev_obj[object], dt);
                }
            }
            Interaction::Strike {
                attacker,
                implement,
                defender,
            } => {
                let imp = world.agents[attacker].implements[implement];
                let pose = imp.pose(world.agents[attacker].state());
                let tip = imp.tip(&pose);
                let tip_vel = pose.vel;
                let def_state = world.agents[defender].state();
                let targets = world.agents[defender].backend.skeleton().target_bodies;
                if let Some((joint, force)) = strike(
                    &tip,
                    &tip_vel,
                    def_state,
                    &targets,
                    world.config.target_radius,
                    world.config.strike_mass,
                    dt,
                ) {
                    let dir = (def_state.joint_pos[joint] - tip).try_normalize(1e-12).unwrap_or_else(Vec3::x);
                    world.agents[attacker].contacts.record(ContactPair::TipTarget, force);
                    world.agents[defender].contacts.forces[joint] += dir * force;
                    world.agents[attacker].contacts.forces[imp.joint] -= dir * force;
                    let _ = world.events.strikes.try_push(StrikeEvent {
                        attacker,
                        defender,
                        joint,
                        force,
                    });
                }
            }
            Interaction::Bars { agent } => bars(world, agent),
            Interaction::Grasp { .. } => {}
        }
    }
    for o in &mut world.objects {
        if o.held.is_none() && !o.frozen {
            project_out_of_floors(o, &world.scene);
        }
    }
    ground_forces(world);
    world.time += dt;
    Ok(())
}

fn grasp(world: &mut World, actions: &[f32]) {
    // Action offsets per agent.
    let mut offsets: ArrayVec<usize, 8> = ArrayVec::new();
    let mut off = 0;
    for a in &world.agents {
        let _ = offsets.try_push(off);
        off += a.backend.skeleton().action_dim;
    }
    for idx in 0..world.interactions.len() {
        let Interaction::Grasp { agent, object } = world.interactions[idx] else {
            continue;
        };
        let grip = actions[offsets[agent] + channel::GRIP] > 0.0;
        let held_by_me = matches!(world.objects[object].held, Some(h) if h.agent == agent);
        if held_by_me && !grip {
            release(world, object);
            let _ = world.events.releases.try_push(ReleaseEvent { agent, object });
        } else if !held_by_me && grip && world.objects[object].held.is_none() {
            let st = world.agents[agent].state();
            let hand = world.agents[agent].backend.skeleton().end_effectors.right_hand;
            let o = &world.objects[object];
            if (o.kin.pos - st.joint_pos[hand]).norm() <= world.config.grasp_radius + o.radius() {
                world.attach(object, agent);
            }
        }
    }
    for o in &mut world.objects {
        let Some(h) = o.held else { continue };
        let st = world.agents[h.agent].backend.state();
        let rot = matrix_from_rot6(&st.joint_rot[h.joint]).unwrap_or_else(nalgebra::Matrix3::identity);
        let arm = rot * h.offset;
        o.kin.pos = st.joint_pos[h.joint] + arm;
        o.kin.lin_vel = st.lin_vel[h.joint] + st.ang_vel[h.joint].cross(&arm);
        o.kin.ang_vel = st.ang_vel[h.joint];
        o.kin.orient = Quat::from_matrix(&rot) * h.orient;
        world.agents[h.agent].contacts.record(ContactPair::HandBall, 0.0);
    }
}

fn release(world: &mut World, object: usize) {
    let o = &mut world.objects[object];
    o.held = None;
    o.kin.ang_vel = Vec3::zeros();
}

fn kinematic_contact(
    world: &mut World,
    agent: usize,
    imp: &Implement,
    c0: Option<Vec3>,
    object: usize,
    b0: Vec3,
    dt: f64,
) {
    let obj = &world.objects[object];
    if obj.held.is_some() || obj.frozen {
        return;
    }
    let pose = imp.pose(world.agents[agent].state());
    let c0 = c0.unwrap_or(pose.center);
    let rt = pose.rot.transpose();
    let r0 = rt * (b0 - c0);
    let r1 = rt * (obj.kin.pos - pose.center);
    let Some(hit) = sweep_sphere(&imp.shape, &r0, &r1, obj.radius()) else {
        return;
    };
    let n = pose.rot * hit.normal;
    let local = r0 + (r1 - r0) * hit.s;
    let dv = kinematic_impulse(&obj.kin.lin_vel, &pose.vel, &n, imp.restitution);
    let mass = obj.spec.mass;
    let point = pose.center + pose.rot * local;
    let force = mass * dv.norm() / dt;
    {
        let o = &mut world.objects[object];
        o.kin.pos = point + n * 1e-6;
        o.kin.lin_vel += dv;
    }
    let a = &mut world.agents[agent];
    a.contacts.record(imp.pair, force);
    a.contacts.forces[imp.joint] -= dv * (mass / dt);
    let _ = world.events.hits.try_push(HitEvent {
        agent,
        object,
        pair: imp.pair,
        point,
        force,
    });
}

fn bars(world: &mut World, agent: usize) {
    let jr = world.config.joint_radius;
    let a = &mut world.agents[agent];
    let st = a.backend.state();
    for (bi, bar) in world.scene.bars.iter().enumerate() {
        for j in 0..st.joint_count() {
            let Some(p) = plane_crossing(&a.prev_pos[j], &st.joint_pos[j], bar.x) else {
                continue;
            };
            if p.y < bar.y_min || p.y > bar.y_max {
                continue;
            }
            let touched = if bar.hurdle {
                p.z < bar.top + jr
            } else {
                p.z < bar.top + jr && p.z > bar.top - bar.thickness - jr
            };
            if touched {
                let pair = if bar.hurdle {
                    ContactPair::BodyHurdle
                } else {
                    ContactPair::BodyBar
                };
                a.contacts.record(pair, 0.0);
            }
            if j == 0 || touched {
                let _ = world.events.bars.try_push(BarCrossing {
                    agent,
                    bar: bi,
                    joint: j,
                    point: p,
                    touched,
                });
            }
        }
    }
}

fn ground_forces(world: &mut World) {
    let eps = world.config.ground_contact;
    let weight = world.config.body_mass * GRAVITY;
    for a in &mut world.agents {
        let st = a.backend.state();
        let touching = |p: &Vec3| p.z - world.scene.ground_height(p.x, p.y) <= eps;
        let n = st.joint_pos.iter().filter(|p| touching(p)).count();
        if n == 0 {
            continue;
        }
        let share = Vec3::new(0.0, 0.0, weight / n as f64);
        for (j, p) in st.joint_pos.iter().enumerate() {
            if touching(p) {
                a.contacts.forces[j] += share / SUBSTEPS as f64;
            }
        }
    }
}
