//! Alternating-freeze self-play scheduling for two-sided sports.
//!
//! Two policy slots take turns: one trains for `phase_length` environment
//! steps while the other is frozen, then they swap. Every swap stores an
//! immutable snapshot of the policy that just stopped training.

use std::collections::VecDeque;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    A,
    B,
}

impl Slot {
    pub fn other(self) -> Slot {
        match self {
            Slot::A => Slot::B,
            Slot::B => Slot::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentRule {
    /// The live frozen slot.
    #[default]
    Latest,
    /// Any stored snapshot, uniformly.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfPlayConfig {
    /// Environment steps per phase.
    pub phase_length: u64,
    /// Snapshots kept; the oldest is evicted first.
    pub capacity: usize,
    pub rule: OpponentRule,
}

impl Default for SelfPlayConfig {
    fn default() -> Self {
        SelfPlayConfig {
            phase_length: 2_000_000,
            capacity: 8,
            rule: OpponentRule::Latest,
        }
    }
}

/// A frozen copy of one slot's policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: u64,
    pub slot: Slot,
    /// Global step of the swap that froze it.
    pub created_step: u64,
    /// SHA-256 of the policy content, lowercase hex.
    pub hash: String,
}

/// What an opponent query resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyHandle {
    Live(Slot),
    Snapshot(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfPlaySchedule {
    config: SelfPlayConfig,
    step: u64,
    active: Slot,
    store: VecDeque<Snapshot>,
    next_id: u64,
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Content used for snapshots when the caller supplies none.
pub fn canonical_content(slot: Slot, generation: u64, step: u64) -> Vec<u8> {
    let mut v = Vec::with_capacity(17);
    v.push(slot as u8);
    v.extend_from_slice(&generation.to_le_bytes());
    v.extend_from_slice(&step.to_le_bytes());
    v
}

impl SelfPlaySchedule {
    pub fn new(config: SelfPlayConfig) -> Result<Self> {
        if config.phase_length == 0 || config.capacity == 0 {
            return Err(Error::Config("phase_length and capacity must be positive".into()));
        }
        Ok(SelfPlaySchedule {
            config,
            step: 0,
            active: Slot::A,
            store: VecDeque::with_capacity(config.capacity),
            next_id: 0,
        })
    }

    pub fn config(&self) -> &SelfPlayConfig {
        &self.config
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn active(&self) -> Slot {
        self.active
    }

    pub fn frozen(&self) -> Slot {
        self.active.other()
    }

    pub fn is_trainable(&self, slot: Slot) -> bool {
        slot == self.active
    }

    /// Snapshots, oldest first.
    pub fn snapshots(&self) -> impl ExactSizeIterator<Item = &Snapshot> {
        self.store.iter()
    }

    /// Slot that trains at `global_step` for a fresh schedule.
    pub fn active_at(phase_length: u64, global_step: u64) -> Slot {
        if (global_step / phase_length) % 2 == 0 {
            Slot::A
        } else {
            Slot::B
        }
    }

    /// Moves to `global_step` using canonical snapshot content. Returns the
    /// number of swaps performed.
    pub fn advance(&mut self, global_step: u64) -> Result<usize> {
        self.advance_with(global_step, canonical_content)
    }

    /// Moves to `global_step`, hashing `content(slot, id, swap_step)` for
    /// each policy frozen on the way.
    pub fn advance_with<F>(&mut self, global_step: u64, mut content: F) -> Result<usize>
    where
        F: FnMut(Slot, u64, u64) -> Vec<u8>,
    {
        if global_step < self.step {
            return Err(Error::InvalidState(format!(
                "global step went backwards: {} -> {global_step}",
                self.step
            )));
        }
        let p = self.config.phase_length;
        let mut swaps = 0;
        let mut boundary = (self.step / p + 1) * p;
        while boundary <= global_step {
            let frozen = self.active;
            let hash = hex(&Sha256::digest(content(frozen, self.next_id, boundary)));
            if self.store.len() == self.config.capacity {
                self.store.pop_front();
            }
            self.store.push_back(Snapshot {
                id: self.next_id,
                slot: frozen,
                created_step: boundary,
                hash,
            });
            self.next_id += 1;
            self.active = frozen.other();
            swaps += 1;
            boundary += p;
        }
        self.step = global_step;
        debug_assert_eq!(self.active, Self::active_at(p, global_step));
        Ok(swaps)
    }

    /// Opponent for the trainable slot. Deterministic in the schedule state
    /// and `seed`; an empty store falls back to the live frozen slot.
    pub fn opponent_for(&self, seed: u64) -> PolicyHandle {
        match (self.config.rule, self.store.len()) {
            (OpponentRule::Latest, _) | (OpponentRule::Uniform, 0) => PolicyHandle::Live(self.frozen()),
            (OpponentRule::Uniform, n) => {
                let mut key = [0u8; 32];
                key[..8].copy_from_slice(&seed.to_le_bytes());
                key[8..16].copy_from_slice(&self.step.to_le_bytes());
                key[16..24].copy_from_slice(&self.next_id.to_le_bytes());
                let k = ChaCha8Rng::from_seed(key).random_range(0..n);
                PolicyHandle::Snapshot(self.store[k].id)
            }
        }
    }

    /// Manifest text: one `id,slot,created_step,sha256` line per snapshot.
    pub fn manifest(&self) -> String {
        let mut s = String::from("id,slot,created_step,sha256\n");
        for snap in &self.store {
            let _ = writeln!(s, "{},{:?},{},{}", snap.id, snap.slot, snap.created_step, snap.hash);
        }
        s
    }
}
