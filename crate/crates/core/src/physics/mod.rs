//! Rigid-object dynamics, contacts, the humanoid backend, and the
//! 30 Hz / 60 Hz stepping loop.

pub mod contact;
pub mod object;
pub mod proxy;
pub mod terrain;
pub mod world;

pub use contact::{Implement, ImplementPose, ImplementShape};
pub use object::{
    box_faces, step_objects, Bar, ContactEvents, Face, Material, ObjectContact, ObjectSpec, Shape, SimObject,
    StaticScene, SurfaceId,
};
pub use proxy::{channel, DynamicsBackend, ProxyConfig, ProxyHumanoid};
pub use terrain::WaveTerrain;
pub use world::{control_step, Interaction, World, WorldConfig, POLICY_DT, SIM_DT, SUBSTEPS};
