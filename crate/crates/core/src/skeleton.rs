//! Skeleton descriptions.
//!
//! Two skeletons ship with the engine: the 24-joint SMPL body and the
//! 52-joint SMPL-X body with articulated fingers. Joint order is frozen
//! (pelvis first) and every observation layout depends on it. Alternate
//! skeletons can be loaded from a TOML document with [`SkeletonSpec::from_toml`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Joint indices of the bodies the engine tracks explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndEffectors {
    pub head: usize,
    pub left_wrist: usize,
    pub right_wrist: usize,
    pub left_hand: usize,
    pub right_hand: usize,
    pub left_foot: usize,
    pub right_foot: usize,
}

impl EndEffectors {
    pub fn as_array(&self) -> [usize; 7] {
        [
            self.head,
            self.left_wrist,
            self.right_wrist,
            self.left_hand,
            self.right_hand,
            self.left_foot,
            self.right_foot,
        ]
    }
}

/// Static description of an articulated humanoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSpec {
    pub name: String,
    pub joint_count: usize,
    pub actuated_count: usize,
    pub action_dim: usize,
    pub body_names: Vec<String>,
    /// Parent joint per joint; `None` for the root.
    pub parents: Vec<Option<usize>>,
    /// Rest position of each joint relative to the pelvis, in the heading
    /// frame (x forward, y left, z up), meters.
    pub rest_offsets: Vec<[f64; 3]>,
    pub end_effectors: EndEffectors,
    /// Joints used as strike targets in combat sports: pelvis, head, spine,
    /// chest, torso.
    pub target_bodies: [usize; 5],
}

const SMPL_NAMES: [&str; 24] = [
    "Pelvis", "L_Hip", "R_Hip", "Spine1", "L_Knee", "R_Knee", "Spine2", "L_Ankle", "R_Ankle",
    "Spine3", "L_Foot", "R_Foot", "Neck", "L_Collar", "R_Collar", "Head", "L_Shoulder",
    "R_Shoulder", "L_Elbow", "R_Elbow", "L_Wrist", "R_Wrist", "L_Hand", "R_Hand",
];

const SMPL_PARENTS: [i32; 24] = [
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21,
];

const SMPL_REST: [[f64; 3]; 24] = [
    [0.0, 0.0, 0.0],
    [0.0, 0.09, -0.09],
    [0.0, -0.09, -0.09],
    [-0.01, 0.0, 0.11],
    [0.01, 0.10, -0.47],
    [0.01, -0.10, -0.47],
    [0.0, 0.0, 0.24],
    [-0.03, 0.11, -0.87],
    [-0.03, -0.11, -0.87],
    [0.0, 0.0, 0.30],
    [0.09, 0.12, -0.92],
    [0.09, -0.12, -0.92],
    [0.0, 0.0, 0.51],
    [0.0, 0.08, 0.42],
    [0.0, -0.08, 0.42],
    [0.03, 0.0, 0.60],
    [0.0, 0.18, 0.44],
    [0.0, -0.18, 0.44],
    [0.0, 0.22, 0.18],
    [0.0, -0.22, 0.18],
    [0.02, 0.24, -0.07],
    [0.02, -0.24, -0.07],
    [0.03, 0.25, -0.15],
    [0.03, -0.25, -0.15],
];

const FINGERS: [&str; 5] = ["Index", "Middle", "Pinky", "Ring", "Thumb"];

impl SkeletonSpec {
    /// The SMPL body: 24 joints, 23 actuated, 69-dimensional actions.
    pub fn smpl() -> Self {
        let parents = SMPL_PARENTS
            .iter()
            .map(|&p| usize::try_from(p).ok())
            .collect();
        SkeletonSpec {
            name: "smpl".into(),
            joint_count: 24,
            actuated_count: 23,
            action_dim: 69,
            body_names: SMPL_NAMES.iter().map(|s| s.to_string()).collect(),
            parents,
            rest_offsets: SMPL_REST.to_vec(),
            end_effectors: EndEffectors {
                head: 15,
                left_wrist: 20,
                right_wrist: 21,
                left_hand: 22,
                right_hand: 23,
                left_foot: 10,
                right_foot: 11,
            },
            target_bodies: [0, 15, 3, 9, 6],
        }
    }

    /// The SMPL-X body without face joints: 22 body joints followed by 15
    /// joints per hand (52 total, 51 actuated, 153-dimensional actions).
    pub fn smplx() -> Self {
        let mut names: Vec<String> = SMPL_NAMES[..22].iter().map(|s| s.to_string()).collect();
        let mut parents: Vec<Option<usize>> = SMPL_PARENTS[..22]
            .iter()
            .map(|&p| usize::try_from(p).ok())
            .collect();
        let mut rest: Vec<[f64; 3]> = SMPL_REST[..22].to_vec();
        for (side, wrist, sign) in [("L", 20usize, 1.0), ("R", 21usize, -1.0)] {
            let w = SMPL_REST[wrist];
            for (f, finger) in FINGERS.iter().enumerate() {
                let spread = (f as f64 - 2.0) * 0.012;
                for seg in 1..=3 {
                    let parent = if seg == 1 { wrist } else { names.len() - 1 };
                    names.push(format!("{side}_{finger}{seg}"));
                    parents.push(Some(parent));
                    rest.push([
                        w[0] + 0.01 + spread,
                        w[1] + sign * 0.01,
                        w[2] - 0.05 - 0.025 * seg as f64,
                    ]);
                }
            }
        }
        let left_middle = names.iter().position(|n| n == "L_Middle1").unwrap();
        let right_middle = names.iter().position(|n| n == "R_Middle1").unwrap();
        SkeletonSpec {
            name: "smplx".into(),
            joint_count: 52,
            actuated_count: 51,
            action_dim: 153,
            body_names: names,
            parents,
            rest_offsets: rest,
            end_effectors: EndEffectors {
                head: 15,
                left_wrist: 20,
                right_wrist: 21,
                left_hand: left_middle,
                right_hand: right_middle,
                left_foot: 10,
                right_foot: 11,
            },
            target_bodies: [0, 15, 3, 9, 6],
        }
    }

    /// Checks the arithmetic and index invariants.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(format!("skeleton {}: {m}", self.name)));
        if self.joint_count == 0 {
            return cfg("joint_count must be positive".into());
        }
        if self.actuated_count + 1 != self.joint_count {
            return cfg(format!(
                "actuated_count {} != joint_count {} - 1",
                self.actuated_count, self.joint_count
            ));
        }
        if self.action_dim != 3 * self.actuated_count {
            return cfg(format!(
                "action_dim {} != 3 * actuated_count {}",
                self.action_dim, self.actuated_count
            ));
        }
        if self.body_names.len() != self.joint_count
            || self.parents.len() != self.joint_count
            || self.rest_offsets.len() != self.joint_count
        {
            return cfg("per-joint tables must have joint_count entries".into());
        }
        if self.parents[0].is_some() {
            return cfg("joint 0 must be the root".into());
        }
        for (j, p) in self.parents.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < j => {}
                _ => return cfg(format!("joint {j} needs a parent with a lower index")),
            }
        }
        for idx in self
            .end_effectors
            .as_array()
            .iter()
            .chain(self.target_bodies.iter())
        {
            if *idx >= self.joint_count {
                return cfg(format!("end-effector index {idx} out of range"));
            }
        }
        if self.rest_offsets.iter().flatten().any(|v| !v.is_finite()) {
            return cfg("rest offsets must be finite".into());
        }
        Ok(())
    }

    /// Parses a skeleton from TOML. The document mirrors the struct fields;
    /// `parents` uses `-1` for the root.
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            name: String,
            joint_count: usize,
            actuated_count: usize,
            action_dim: usize,
            body_names: Vec<String>,
            parents: Vec<i64>,
            rest_offsets: Vec<[f64; 3]>,
            end_effectors: EndEffectors,
            target_bodies: [usize; 5],
        }
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let spec = SkeletonSpec {
            name: raw.name,
            joint_count: raw.joint_count,
            actuated_count: raw.actuated_count,
            action_dim: raw.action_dim,
            body_names: raw.body_names,
            parents: raw
                .parents
                .into_iter()
                .map(|p| usize::try_from(p).ok())
                .collect(),
            rest_offsets: raw.rest_offsets,
            end_effectors: raw.end_effectors,
            target_bodies: raw.target_bodies,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        #[derive(Serialize)]
        struct Raw<'a> {
            name: &'a str,
            joint_count: usize,
            actuated_count: usize,
            action_dim: usize,
            body_names: &'a [String],
            parents: Vec<i64>,
            rest_offsets: &'a [[f64; 3]],
            target_bodies: [usize; 5],
            end_effectors: EndEffectors,
        }
        let raw = Raw {
            name: &self.name,
            joint_count: self.joint_count,
            actuated_count: self.actuated_count,
            action_dim: self.action_dim,
            body_names: &self.body_names,
            parents: self
                .parents
                .iter()
                .map(|p| p.map_or(-1, |p| p as i64))
                .collect(),
            rest_offsets: &self.rest_offsets,
            target_bodies: self.target_bodies,
            end_effectors: self.end_effectors,
        };
        toml::to_string(&raw).expect("skeleton serializes")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.body_names.iter().position(|n| n == name)
    }

    pub fn children(&self, joint: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter(move |(_, p)| **p == Some(joint))
            .map(|(j, _)| j)
    }

    /// Returns true when `ancestor` lies on the path from `joint` to the root
    /// (a joint is its own ancestor).
    pub fn is_ancestor(&self, ancestor: usize, mut joint: usize) -> bool {
        loop {
            if joint == ancestor {
                return true;
            }
            match self.parents[joint] {
                Some(p) => joint = p,
                None => return false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_skeletons_satisfy_invariants() {
        let smpl = SkeletonSpec::smpl();
        smpl.validate().unwrap();
        assert_eq!(
            (smpl.joint_count, smpl.actuated_count, smpl.action_dim),
            (24, 23, 69)
        );
        let smplx = SkeletonSpec::smplx();
        smplx.validate().unwrap();
        assert_eq!(
            (smplx.joint_count, smplx.actuated_count, smplx.action_dim),
            (52, 51, 153)
        );
        assert_eq!(smplx.body_names[22], "L_Index1");
        assert_eq!(smplx.children(20).count(), 5);
    }

    #[test]
    fn toml_round_trip() {
        let smplx = SkeletonSpec::smplx();
        let text = smplx.to_toml();
        let back = SkeletonSpec::from_toml(&text).unwrap();
        assert_eq!(back, smplx);
    }

    #[test]
    fn bad_arithmetic_is_rejected() {
        let mut spec = SkeletonSpec::smpl();
        spec.action_dim = 70;
        let text = spec.to_toml();
        assert!(matches!(
            SkeletonSpec::from_toml(&text),
            Err(Error::Config(_))
        ));
        let mut spec = SkeletonSpec::smpl();
        spec.end_effectors.head = 40;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn target_bodies_are_torso_chain() {
        let smpl = SkeletonSpec::smpl();
        let names: Vec<&str> = smpl
            .target_bodies
            .iter()
            .map(|&j| smpl.body_names[j].as_str())
            .collect();
        assert_eq!(names, ["Pelvis", "Head", "Spine1", "Spine3", "Spine2"]);
    }
}
