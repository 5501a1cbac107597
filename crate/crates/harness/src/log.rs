//! Binary trajectory logs and bitwise replay.
//!
//! A log is a sequence of records, each a little-endian `u32` payload length
//! followed by the payload. The first record is the header, the last is a
//! trailer holding the SHA-256 of every byte before it. Floats are 32-bit
//! little-endian. [`schema_text`] renders the layout for the sidecar file.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use sportsim_core::envs::{MatchState, SportConfig, SportEnv, TerminationReason};
use sportsim_core::rewards::RewardBreakdown;
use sportsim_core::ENGINE_VERSION;

use crate::error::{hex, Error, Result};

pub const LOG_MAGIC: [u8; 4] = *b"SPTL";
pub const LOG_FORMAT: u16 = 1;

const TAG_HEADER: u8 = b'H';
const TAG_STEP: u8 = b'S';
const TAG_END: u8 = b'E';

/// Hex SHA-256 of the canonical TOML rendering of `cfg`.
pub fn config_hash(cfg: &SportConfig) -> String {
    hex(&Sha256::digest(cfg.to_toml().as_bytes()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogHeader {
    pub format: u16,
    pub engine_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config_toml: String,
    pub skeleton: String,
    pub joint_count: u16,
    pub agents: u16,
    pub obs_dim: u32,
    pub action_dim: u32,
    pub policy: String,
}

impl LogHeader {
    pub fn new(cfg: &SportConfig, seed: u64, policy: &str) -> Result<Self> {
        let env = SportEnv::new(cfg.clone(), seed, 0)?;
        let skel = cfg.skeleton_spec();
        Ok(LogHeader {
            format: LOG_FORMAT,
            engine_version: ENGINE_VERSION.to_string(),
            config_hash: config_hash(cfg),
            seed,
            config_toml: cfg.to_toml(),
            skeleton: skel.name.clone(),
            joint_count: skel.joint_count as u16,
            agents: env.agent_count() as u16,
            obs_dim: env.obs_dim() as u32,
            action_dim: env.action_dim() as u32,
            policy: policy.to_string(),
        })
    }

    pub fn config(&self) -> Result<SportConfig> {
        Ok(SportConfig::from_toml(&self.config_toml)?)
    }

    fn obs_len(&self) -> usize {
        self.agents as usize * self.obs_dim as usize
    }

    fn action_len(&self) -> usize {
        self.agents as usize * self.action_dim as usize
    }
}

/// One reward term as logged.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedTerm {
    pub name: String,
    pub value: f32,
    pub weight: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedReward {
    pub total: f32,
    pub branch: u8,
    pub terms: Vec<LoggedTerm>,
}

impl LoggedReward {
    fn same_as(&self, b: &RewardBreakdown) -> bool {
        self.total.to_bits() == (b.total() as f32).to_bits()
            && self.branch == b.branch()
            && self.terms.len() == b.terms().len()
            && self.terms.iter().zip(b.terms()).all(|(l, t)| {
                l.name == t.name
                    && l.value.to_bits() == (t.value as f32).to_bits()
                    && l.weight.to_bits() == (t.weight as f32).to_bits()
            })
    }
}

/// One control step of one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub stream: u64,
    pub episode: u64,
    /// Control steps taken in the episode before this one.
    pub step: u32,
    /// Observation the actions were chosen from, `[agent][obs_dim]`.
    pub obs: Vec<f32>,
    pub actions: Vec<f32>,
    pub rewards: Vec<LoggedReward>,
    pub done: bool,
    pub reason: Option<TerminationReason>,
    pub match_state: [f32; 5],
}

/// Borrowed form of a [`StepRecord`] used while writing.
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub stream: u64,
    pub episode: u64,
    pub step: u32,
    pub obs: &'a [f32],
    pub actions: &'a [f32],
    pub rewards: &'a [RewardBreakdown],
    pub reason: Option<TerminationReason>,
    pub match_state: &'a MatchState,
}

/// Streams records to `W`, hashing as it goes.
pub struct LogWriter<W: Write> {
    out: W,
    hasher: Sha256,
    header: LogHeader,
    records: u64,
    buf: Vec<u8>,
}

impl<W: Write> LogWriter<W> {
    pub fn new(out: W, header: LogHeader) -> Result<Self> {
        let mut w = LogWriter {
            out,
            hasher: Sha256::new(),
            header,
            records: 0,
            buf: Vec::with_capacity(4096),
        };
        let h = w.header.clone();
        w.buf.clear();
        w.buf.push(TAG_HEADER);
        w.buf.extend_from_slice(&LOG_MAGIC);
        w.buf.extend_from_slice(&h.format.to_le_bytes());
        put_str(&mut w.buf, &h.engine_version);
        put_str(&mut w.buf, &h.config_hash);
        w.buf.extend_from_slice(&h.seed.to_le_bytes());
        put_str(&mut w.buf, &h.config_toml);
        put_str(&mut w.buf, &h.skeleton);
        w.buf.extend_from_slice(&h.joint_count.to_le_bytes());
        w.buf.extend_from_slice(&h.agents.to_le_bytes());
        w.buf.extend_from_slice(&h.obs_dim.to_le_bytes());
        w.buf.extend_from_slice(&h.action_dim.to_le_bytes());
        put_str(&mut w.buf, &h.policy);
        w.flush_record()?;
        Ok(w)
    }

    pub fn header(&self) -> &LogHeader {
        &self.header
    }

    pub fn write_step(&mut self, s: &StepView<'_>) -> Result<()> {
        if s.obs.len() != self.header.obs_len() || s.actions.len() != self.header.action_len() {
            return Err(Error::Log(format!(
                "record shape obs {} / actions {} does not match header {} / {}",
                s.obs.len(),
                s.actions.len(),
                self.header.obs_len(),
                self.header.action_len()
            )));
        }
        self.buf.clear();
        self.buf.push(TAG_STEP);
        self.buf.extend_from_slice(&s.stream.to_le_bytes());
        self.buf.extend_from_slice(&s.episode.to_le_bytes());
        self.buf.extend_from_slice(&s.step.to_le_bytes());
        put_f32s(&mut self.buf, s.obs);
        put_f32s(&mut self.buf, s.actions);
        self.buf.push(s.rewards.len() as u8);
        for r in s.rewards {
            self.buf.extend_from_slice(&(r.total() as f32).to_le_bytes());
            self.buf.push(r.branch());
            self.buf.push(r.terms().len() as u8);
            for t in r.terms() {
                self.buf.push(t.name.len() as u8);
                self.buf.extend_from_slice(t.name.as_bytes());
                self.buf.extend_from_slice(&(t.value as f32).to_le_bytes());
                self.buf.extend_from_slice(&(t.weight as f32).to_le_bytes());
            }
        }
        self.buf.push(s.reason.is_some() as u8);
        self.buf.push(s.reason.map_or(0, |r| r.code()));
        put_f32s(&mut self.buf, &s.match_state.to_array());
        self.records += 1;
        self.flush_record()
    }

    /// Writes the trailer and returns the sink.
    pub fn finish(mut self) -> Result<W> {
        let digest = self.hasher.clone().finalize();
        self.buf.clear();
        self.buf.push(TAG_END);
        self.buf.extend_from_slice(&self.records.to_le_bytes());
        self.buf.extend_from_slice(&digest);
        let len = (self.buf.len() as u32).to_le_bytes();
        self.out.write_all(&len)?;
        self.out.write_all(&self.buf)?;
        self.out.flush()?;
        Ok(self.out)
    }

    fn flush_record(&mut self) -> Result<()> {
        let len = (self.buf.len() as u32).to_le_bytes();
        self.hasher.update(len);
        self.hasher.update(&self.buf);
        self.out.write_all(&len)?;
        self.out.write_all(&self.buf)?;
        Ok(())
    }
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
    buf.extend_from_slice(s.as_bytes());
}

fn put_f32s(buf: &mut Vec<u8>, v: &[f32]) {
    for x in v {
        buf.extend_from_slice(&x.to_le_bytes());
    }
}

struct Cursor<'a> {
    b: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.b.len());
        let end = end.ok_or_else(|| Error::Log(format!("truncated record at byte {}", self.at)))?;
        let s = &self.b[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.take(n.checked_mul(4).ok_or_else(|| Error::Log("length overflow".into()))?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn string(&mut self, len: usize) -> Result<String> {
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| Error::Log("invalid utf-8".into()))
    }

    fn str32(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        self.string(n)
    }

    fn done(&self) -> bool {
        self.at == self.b.len()
    }
}

/// A parsed, hash-verified log.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub records: Vec<StepRecord>,
}

impl TrajectoryLog {
    /// Parses `bytes` after checking the trailer hash. The engine version
    /// is not checked here; [`replay`] does that.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut spans = Vec::new();
        let mut c = Cursor { b: bytes, at: 0 };
        while !c.done() {
            let start = c.at;
            let len = c.u32()? as usize;
            c.take(len)?;
            spans.push((start, start + 4, start + 4 + len));
        }
        let &(end_start, body, end) = spans.last().ok_or_else(|| Error::Log("empty log".into()))?;
        let trailer = &bytes[body..end];
        if trailer.len() != 1 + 8 + 32 || trailer[0] != TAG_END {
            return Err(Error::Log("missing trailer".into()));
        }
        let computed = Sha256::digest(&bytes[..end_start]);
        if computed.as_slice() != &trailer[9..] {
            return Err(Error::Hash {
                stored: hex(&trailer[9..]),
                computed: hex(&computed),
            });
        }
        let count = u64::from_le_bytes(trailer[1..9].try_into().unwrap());
        if spans.len() < 2 || count != (spans.len() - 2) as u64 {
            return Err(Error::Log(format!("trailer counts {count} records, found {}", spans.len().saturating_sub(2))));
        }
        let header = parse_header(&bytes[spans[0].1..spans[0].2])?;
        let records = spans[1..spans.len() - 1]
            .iter()
            .map(|&(_, s, e)| parse_step(&header, &bytes[s..e]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrajectoryLog { header, records })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }

    /// Number of distinct `(stream, episode)` pairs with at least one record.
    pub fn episode_count(&self) -> usize {
        let mut seen: Vec<(u64, u64)> = self.records.iter().map(|r| (r.stream, r.episode)).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

fn parse_header(p: &[u8]) -> Result<LogHeader> {
    let mut c = Cursor { b: p, at: 0 };
    if c.u8()? != TAG_HEADER || c.take(4)? != LOG_MAGIC {
        return Err(Error::Log("bad header magic".into()));
    }
    let h = LogHeader {
        format: c.u16()?,
        engine_version: c.str32()?,
        config_hash: c.str32()?,
        seed: c.u64()?,
        config_toml: c.str32()?,
        skeleton: c.str32()?,
        joint_count: c.u16()?,
        agents: c.u16()?,
        obs_dim: c.u32()?,
        action_dim: c.u32()?,
        policy: c.str32()?,
    };
    if !c.done() {
        return Err(Error::Log("trailing bytes in header".into()));
    }
    Ok(h)
}

fn parse_step(h: &LogHeader, p: &[u8]) -> Result<StepRecord> {
    let mut c = Cursor { b: p, at: 0 };
    if c.u8()? != TAG_STEP {
        return Err(Error::Log("expected a step record".into()));
    }
    let stream = c.u64()?;
    let episode = c.u64()?;
    let step = c.u32()?;
    let obs = c.f32s(h.obs_len())?;
    let actions = c.f32s(h.action_len())?;
    let n = c.u8()? as usize;
    let mut rewards = Vec::with_capacity(n);
    for _ in 0..n {
        let total = c.f32()?;
        let branch = c.u8()?;
        let k = c.u8()? as usize;
        let mut terms = Vec::with_capacity(k);
        for _ in 0..k {
            let len = c.u8()? as usize;
            terms.push(LoggedTerm {
                name: c.string(len)?,
                value: c.f32()?,
                weight: c.f32()?,
            });
        }
        rewards.push(LoggedReward { total, branch, terms });
    }
    let done = c.u8()? != 0;
    let code = c.u8()?;
    let reason = match (done, code) {
        (false, 0) => None,
        (true, k) => Some(TerminationReason::from_code(k).ok_or_else(|| Error::Log(format!("unknown reason code {k}")))?),
        (false, _) => return Err(Error::Log("reason without done flag".into())),
    };
    let ms = c.f32s(5)?;
    if !c.done() {
        return Err(Error::Log("trailing bytes in step record".into()));
    }
    Ok(StepRecord {
        stream,
        episode,
        step,
        obs,
        actions,
        rewards,
        done,
        reason,
        match_state: ms.try_into().unwrap(),
    })
}

/// Where the first divergence was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub record: usize,
    pub stream: u64,
    pub episode: u64,
    pub step: u32,
    pub field: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayVerdict {
    pub records: usize,
    pub episodes: usize,
    pub mismatch: Option<Mismatch>,
}

impl ReplayVerdict {
    pub fn is_clean(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl std::fmt::Display for ReplayVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.mismatch {
            None => write!(f, "clean: {} records, {} episodes replayed bitwise", self.records, self.episodes),
            Some(m) => write!(
                f,
                "diverged at record {} (stream {}, episode {}, step {}): {}",
                m.record, m.stream, m.episode, m.step, m.field
            ),
        }
    }
}

/// Re-executes every logged step on a fresh single environment per stream
/// and compares observations, rewards, termination and match state bit
/// for bit. The log's batch size plays no part.
pub fn replay(log: &TrajectoryLog) -> Result<ReplayVerdict> {
    let h = &log.header;
    if h.engine_version != ENGINE_VERSION || h.format != LOG_FORMAT {
        return Err(Error::Incompatible {
            log: format!("{} (log format {})", h.engine_version, h.format),
            engine: format!("{ENGINE_VERSION} (log format {LOG_FORMAT})"),
        });
    }
    let cfg = h.config()?;
    if config_hash(&cfg) != h.config_hash {
        return Err(Error::Log("embedded configuration does not match its hash".into()));
    }
    let mut envs: HashMap<u64, SportEnv> = HashMap::new();
    let mut obs = vec![0.0f32; h.obs_len()];
    let mut verdict = ReplayVerdict {
        records: 0,
        episodes: log.episode_count(),
        mismatch: None,
    };
    for (i, r) in log.records.iter().enumerate() {
        let env = match envs.entry(r.stream) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => v.insert(SportEnv::new(cfg.clone(), h.seed, r.stream)?),
        };
        if env.episode() != r.episode || env.done().is_some() {
            env.reset_episode(r.episode)?;
        }
        let fail = |field| Mismatch {
            record: i,
            stream: r.stream,
            episode: r.episode,
            step: r.step,
            field,
        };
        if env.steps() != r.step {
            verdict.mismatch = Some(fail("step index"));
            break;
        }
        env.write_obs(&mut obs)?;
        if !bits_eq(&obs, &r.obs) {
            verdict.mismatch = Some(fail("observation"));
            break;
        }
        let out = env.step(&r.actions)?;
        let field = if env.rewards().len() != r.rewards.len()
            || !r.rewards.iter().zip(env.rewards()).all(|(l, b)| l.same_as(b))
        {
            Some("reward")
        } else if out.done != r.done || out.reason != r.reason {
            Some("termination")
        } else if !bits_eq(&env.match_state().to_array(), &r.match_state) {
            Some("match state")
        } else {
            None
        };
        if let Some(field) = field {
            verdict.mismatch = Some(fail(field));
            break;
        }
        verdict.records += 1;
    }
    Ok(verdict)
}

fn bits_eq(a: &[f32], b: &[f32]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Plain-text description of the binary layout for a log with `h`.
pub fn schema_text(h: &LogHeader) -> String {
    let (a, o, d) = (h.agents, h.obs_dim, h.action_dim);
    format!(
        "\
sportsim trajectory log, format {fmt}
engine {engine}
config_sha256 {hash}
seed {seed}
skeleton {skel} ({joints} joints)
policy {policy}

All integers and floats are little-endian; floats are IEEE-754 binary32.
The file is a sequence of records: u32 payload_len, then payload_len bytes.
Strings are u32 byte length followed by UTF-8, except term names (u8 length).

record 0, header:
  u8 'H' | [4] magic \"SPTL\" | u16 format | str engine_version | str config_sha256
  u64 seed | str config_toml | str skeleton | u16 joint_count
  u16 agents ({a}) | u32 obs_dim ({o}) | u32 action_dim ({d}) | str policy

records 1..n, one control step of one environment:
  u8 'S' | u64 stream | u64 episode | u32 step
  f32[{a}*{o}] observation before the step, agent-major
  f32[{a}*{d}] actions, agent-major
  u8 agent_count, then per agent:
    f32 total | u8 branch | u8 term_count | term_count x (u8 len, name, f32 value, f32 weight)
  u8 done | u8 reason_code (0 = none; codes as in TerminationReason::code)
  f32[5] match state: score_a, score_b, server, n_hit, point_latch

last record, trailer:
  u8 'E' | u64 step_record_count | [32] SHA-256 of every byte before this record
",
        fmt = h.format,
        engine = h.engine_version,
        hash = h.config_hash,
        seed = h.seed,
        skel = h.skeleton,
        joints = h.joint_count,
        policy = h.policy,
    )
}
