//! Wire protocol for driving an [`EnvBatch`] from another process.
//!
//! A frame is `magic (4) | version u16 | kind u8 | N u32 | payload`, all
//! little-endian, with the payload a run of `f32`. On a stream each frame is
//! preceded by its byte length as a `u32`. Payloads by kind:
//!
//! | kind | sender | payload |
//! |------|--------|---------|
//! | reset (0) | client | empty; `N` is the expected batch size or 0 |
//! | step (1) | client | actions, `N × agents × action_dim` |
//! | obs (2) | server | env spec (4), observations `N × agents × obs_dim`, rewards `N × agents`, dones `N` |
//! | close (3) | either | empty |
//! | error (255) | server | one value, the [`ErrorCode`] |
//!
//! The env spec is `[sport index, agents, obs_dim, action_dim]`, the sport
//! index being the position in [`Sport::ALL`]. The first client frame must
//! be a reset carrying the server's protocol version; anything else ends the
//! session. After that, malformed or mis-shaped requests get an error frame
//! and the session continues.

use std::io::{ErrorKind, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use sportsim_core::envs::{EnvBatch, Sport};

use crate::error::{Error, Result};
use crate::policy::Policy;

pub const MAGIC: [u8; 4] = *b"SPBR";
pub const PROTOCOL_VERSION: u16 = 1;
/// Bytes before the payload.
pub const HEADER_LEN: usize = 11;
/// Largest frame accepted from a peer.
pub const MAX_FRAME: usize = 1 << 30;
const SPEC_LEN: usize = 4;
const CONNECT_ATTEMPTS: u32 = 3;
const BACKOFF: Duration = Duration::from_millis(50);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Kind {
    Reset = 0,
    Step = 1,
    Obs = 2,
    Close = 3,
    Error = 0xFF,
}

impl Kind {
    pub fn from_u8(b: u8) -> Option<Self> {
        Some(match b {
            0 => Kind::Reset,
            1 => Kind::Step,
            2 => Kind::Obs,
            3 => Kind::Close,
            0xFF => Kind::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ErrorCode {
    BadFrame = 1,
    Version = 2,
    Shape = 3,
    BatchSize = 4,
    Engine = 5,
    Unexpected = 6,
}

impl ErrorCode {
    pub fn from_value(v: f32) -> Option<Self> {
        Some(match v as u32 {
            1 => ErrorCode::BadFrame,
            2 => ErrorCode::Version,
            3 => ErrorCode::Shape,
            4 => ErrorCode::BatchSize,
            5 => ErrorCode::Engine,
            6 => ErrorCode::Unexpected,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeMessage {
    pub version: u16,
    pub kind: Kind,
    pub n: u32,
    pub payload: Vec<f32>,
}

impl BridgeMessage {
    pub fn new(kind: Kind, n: u32, payload: Vec<f32>) -> Self {
        BridgeMessage {
            version: PROTOCOL_VERSION,
            kind,
            n,
            payload,
        }
    }

    pub fn error(code: ErrorCode) -> Self {
        Self::new(Kind::Error, 0, vec![code as u8 as f32])
    }

    /// The error code of an error frame.
    pub fn error_code(&self) -> Option<ErrorCode> {
        match (self.kind, self.payload.as_slice()) {
            (Kind::Error, [v]) => ErrorCode::from_value(*v),
            _ => None,
        }
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + 4 * self.payload.len()
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) {
        out.reserve(self.encoded_len());
        put_header(out, self.version, self.kind, self.n);
        put_f32s(out, &self.payload);
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.encode_into(&mut out);
        out
    }

    /// Parses one frame without its length prefix. The version is returned
    /// as sent; checking it is the session's job.
    pub fn decode(b: &[u8]) -> Result<Self> {
        let mut m = BridgeMessage::new(Kind::Close, 0, Vec::new());
        m.decode_from(b)?;
        Ok(m)
    }

    /// [`decode`](Self::decode) into an existing message, reusing its payload.
    pub fn decode_from(&mut self, b: &[u8]) -> Result<()> {
        if b.len() < HEADER_LEN {
            return Err(Error::Protocol(format!("frame of {} bytes is shorter than the header", b.len())));
        }
        if b[..4] != MAGIC {
            return Err(Error::Protocol("bad magic".into()));
        }
        let version = u16::from_le_bytes([b[4], b[5]]);
        let kind = Kind::from_u8(b[6]).ok_or_else(|| Error::Protocol(format!("unknown frame kind {}", b[6])))?;
        let n = u32::from_le_bytes(b[7..11].try_into().unwrap());
        let body = &b[HEADER_LEN..];
        if body.len() % 4 != 0 {
            return Err(Error::Protocol(format!("payload of {} bytes is not a whole number of f32", body.len())));
        }
        self.version = version;
        self.kind = kind;
        self.n = n;
        self.payload.clear();
        self.payload
            .extend(body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())));
        Ok(())
    }
}

fn put_header(out: &mut Vec<u8>, version: u16, kind: Kind, n: u32) {
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&version.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&n.to_le_bytes());
}

fn put_f32s(out: &mut Vec<u8>, vals: &[f32]) {
    let start = out.len();
    out.resize(start + 4 * vals.len(), 0);
    for (c, v) in out[start..].chunks_exact_mut(4).zip(vals) {
        c.copy_from_slice(&v.to_le_bytes());
    }
}

/// Clears `out` and starts a length-prefixed frame of `payload_len` values.
fn begin_frame(out: &mut Vec<u8>, kind: Kind, n: u32, payload_len: usize) {
    let len = HEADER_LEN + 4 * payload_len;
    out.clear();
    out.reserve(4 + len);
    out.extend_from_slice(&(len as u32).to_le_bytes());
    put_header(out, PROTOCOL_VERSION, kind, n);
}

/// Writes `msg` with its length prefix.
pub fn write_frame<W: Write>(w: &mut W, msg: &BridgeMessage) -> Result<()> {
    write_frame_with(w, msg, &mut Vec::new())
}

fn write_frame_with<W: Write>(w: &mut W, msg: &BridgeMessage, buf: &mut Vec<u8>) -> Result<()> {
    buf.clear();
    buf.extend_from_slice(&(msg.encoded_len() as u32).to_le_bytes());
    msg.encode_into(buf);
    w.write_all(buf)?;
    w.flush()?;
    Ok(())
}

/// Writes the obs frame for `batch` straight from its buffers.
fn write_obs<W: Write>(w: &mut W, batch: &EnvBatch, buf: &mut Vec<u8>) -> Result<()> {
    let spec = EnvSpec::of(batch);
    begin_frame(buf, Kind::Obs, spec.batch, spec.obs_payload_len());
    put_f32s(buf, &spec.to_payload());
    put_f32s(buf, batch.obs());
    put_f32s(buf, batch.rewards());
    buf.extend(batch.dones().iter().flat_map(|&d| (d as f32).to_le_bytes()));
    w.write_all(buf)?;
    w.flush()?;
    Ok(())
}

/// Reads one length-prefixed frame. `Ok(None)` on a clean end of stream.
/// The outer result fails on transport errors; the inner one on a frame
/// that arrived whole but does not parse.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Result<BridgeMessage>>> {
    let mut buf = Vec::new();
    Ok(read_frame_bytes(r, &mut buf)?.then(|| BridgeMessage::decode(&buf)))
}

/// Reads one frame's bytes into `buf`; `false` on a clean end of stream.
fn read_frame_bytes<R: Read>(r: &mut R, buf: &mut Vec<u8>) -> Result<bool> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(false),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_le_bytes(len) as usize;
    if len > MAX_FRAME {
        return Err(Error::Protocol(format!("frame of {len} bytes exceeds the limit")));
    }
    buf.resize(len, 0);
    r.read_exact(buf)?;
    Ok(true)
}

/// Shape of the environments behind a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvSpec {
    pub sport: Sport,
    pub batch: u32,
    pub agents: u32,
    pub obs_dim: u32,
    pub action_dim: u32,
}

impl EnvSpec {
    pub fn of(batch: &EnvBatch) -> Self {
        EnvSpec {
            sport: batch.envs()[0].sport(),
            batch: batch.len() as u32,
            agents: batch.agents_per_env() as u32,
            obs_dim: batch.obs_dim() as u32,
            action_dim: batch.action_dim() as u32,
        }
    }

    fn to_payload(self) -> [f32; SPEC_LEN] {
        let idx = Sport::ALL.iter().position(|s| *s == self.sport).unwrap();
        [idx as f32, self.agents as f32, self.obs_dim as f32, self.action_dim as f32]
    }

    pub fn action_len(&self) -> usize {
        (self.batch * self.agents * self.action_dim) as usize
    }

    fn obs_payload_len(&self) -> usize {
        let (n, a) = (self.batch as usize, self.agents as usize);
        SPEC_LEN + n * a * self.obs_dim as usize + n * a + n
    }
}

/// Contents of an obs frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsFrame {
    pub spec: EnvSpec,
    pub obs: Vec<f32>,
    pub rewards: Vec<f32>,
    pub dones: Vec<f32>,
}

impl ObsFrame {
    pub fn of(batch: &EnvBatch) -> Self {
        ObsFrame {
            spec: EnvSpec::of(batch),
            obs: batch.obs().to_vec(),
            rewards: batch.rewards().to_vec(),
            dones: batch.dones().iter().map(|&d| d as f32).collect(),
        }
    }

    pub fn to_message(&self) -> BridgeMessage {
        let mut p = Vec::with_capacity(self.spec.obs_payload_len());
        p.extend_from_slice(&self.spec.to_payload());
        p.extend_from_slice(&self.obs);
        p.extend_from_slice(&self.rewards);
        p.extend_from_slice(&self.dones);
        BridgeMessage::new(Kind::Obs, self.spec.batch, p)
    }

    /// Parses an encoded obs frame without an intermediate message.
    fn from_bytes(b: &[u8]) -> Result<Self> {
        let head = BridgeMessage::decode(&b[..HEADER_LEN + 4 * SPEC_LEN])?;
        let body = &b[HEADER_LEN + 4 * SPEC_LEN..];
        let spec = ObsFrame::spec_of(&head)?;
        if body.len() % 4 != 0 || SPEC_LEN + body.len() / 4 != spec.obs_payload_len() {
            return Err(Error::Protocol(format!(
                "obs payload has {} bytes, its shapes need {} values",
                body.len() + 4 * SPEC_LEN,
                spec.obs_payload_len()
            )));
        }
        let (n, a) = (spec.batch as usize, spec.agents as usize);
        let o = n * a * spec.obs_dim as usize;
        let floats = |r: &[u8]| -> Vec<f32> {
            r.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect()
        };
        Ok(ObsFrame {
            spec,
            obs: floats(&body[..4 * o]),
            rewards: floats(&body[4 * o..4 * (o + n * a)]),
            dones: floats(&body[4 * (o + n * a)..]),
        })
    }

    fn spec_of(m: &BridgeMessage) -> Result<EnvSpec> {
        let p = &m.payload;
        if p.len() < SPEC_LEN {
            return Err(Error::Protocol("obs frame without an env spec".into()));
        }
        let sport = *Sport::ALL
            .get(p[0] as usize)
            .ok_or_else(|| Error::Protocol(format!("unknown sport index {}", p[0])))?;
        Ok(EnvSpec {
            sport,
            batch: m.n,
            agents: p[1] as u32,
            obs_dim: p[2] as u32,
            action_dim: p[3] as u32,
        })
    }

    pub fn from_message(m: &BridgeMessage) -> Result<Self> {
        if m.kind != Kind::Obs {
            return Err(match m.error_code() {
                Some(code) => Error::Protocol(format!("peer reported {code:?}")),
                None => Error::Protocol(format!("expected an obs frame, got {:?}", m.kind)),
            });
        }
        let p = &m.payload;
        let spec = ObsFrame::spec_of(m)?;
        if p.len() != spec.obs_payload_len() {
            return Err(Error::Protocol(format!(
                "obs payload has {} values, its shapes need {}",
                p.len(),
                spec.obs_payload_len()
            )));
        }
        let (n, a) = (m.n as usize, spec.agents as usize);
        let o = n * a * spec.obs_dim as usize;
        let rest = &p[SPEC_LEN..];
        Ok(ObsFrame {
            spec,
            obs: rest[..o].to_vec(),
            rewards: rest[o..o + n * a].to_vec(),
            dones: rest[o + n * a..].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SessionStats {
    pub steps: u64,
    pub resets: u64,
    pub errors: u64,
}

/// Serves one session on `stream` until the client closes or disconnects.
pub fn serve_session<S: Read + Write>(mut stream: S, batch: &mut EnvBatch) -> Result<SessionStats> {
    let mut stats = SessionStats::default();
    let first = match read_frame(&mut stream)? {
        None => return Err(Error::Handshake("client sent nothing".into())),
        Some(Err(e)) => {
            write_frame(&mut stream, &BridgeMessage::error(ErrorCode::BadFrame))?;
            return Err(Error::Handshake(e.to_string()));
        }
        Some(Ok(m)) => m,
    };
    let refuse = |code, why: String, stream: &mut S| -> Result<SessionStats> {
        write_frame(stream, &BridgeMessage::error(code))?;
        Err(Error::Handshake(why))
    };
    if first.version != PROTOCOL_VERSION {
        let why = format!("client speaks version {}, server {PROTOCOL_VERSION}", first.version);
        return refuse(ErrorCode::Version, why, &mut stream);
    }
    if first.kind != Kind::Reset {
        return refuse(ErrorCode::Unexpected, format!("expected reset, got {:?}", first.kind), &mut stream);
    }
    if first.n != 0 && first.n as usize != batch.len() {
        let why = format!("client expects {} environments, server has {}", first.n, batch.len());
        return refuse(ErrorCode::BatchSize, why, &mut stream);
    }
    batch.reset_all()?;
    stats.resets += 1;
    let (mut rbuf, mut wbuf) = (Vec::new(), Vec::new());
    let mut msg = first;
    write_obs(&mut stream, batch, &mut wbuf)?;

    loop {
        if !read_frame_bytes(&mut stream, &mut rbuf)? {
            return Ok(stats);
        }
        let code = if msg.decode_from(&rbuf).is_err() {
            Some(ErrorCode::BadFrame)
        } else if msg.version != PROTOCOL_VERSION {
            Some(ErrorCode::Version)
        } else {
            match msg.kind {
                Kind::Reset => {
                    batch.reset_all()?;
                    stats.resets += 1;
                    None
                }
                Kind::Step if msg.n as usize != batch.len() => Some(ErrorCode::BatchSize),
                Kind::Step if msg.payload.len() != batch.action_len() => Some(ErrorCode::Shape),
                Kind::Step => match batch.step(&msg.payload) {
                    Ok(()) => {
                        stats.steps += 1;
                        None
                    }
                    Err(sportsim_core::Error::InvalidAction(_)) => Some(ErrorCode::Shape),
                    Err(e) => {
                        write_frame(&mut stream, &BridgeMessage::error(ErrorCode::Engine))?;
                        return Err(e.into());
                    }
                },
                Kind::Close => {
                    write_frame(&mut stream, &BridgeMessage::new(Kind::Close, 0, Vec::new()))?;
                    return Ok(stats);
                }
                Kind::Obs | Kind::Error => Some(ErrorCode::Unexpected),
            }
        };
        match code {
            Some(code) => {
                stats.errors += 1;
                write_frame_with(&mut stream, &BridgeMessage::error(code), &mut wbuf)?;
            }
            None => write_obs(&mut stream, batch, &mut wbuf)?,
        }
    }
}

/// Accepts `sessions` connections one after another and serves each.
pub fn serve(listener: &TcpListener, batch: &mut EnvBatch, sessions: usize) -> Result<Vec<Result<SessionStats>>> {
    let mut out = Vec::with_capacity(sessions);
    for _ in 0..sessions {
        let (stream, _) = listener.accept()?;
        stream.set_nodelay(true)?;
        out.push(serve_session(stream, batch));
    }
    Ok(out)
}

/// Connects with three attempts and exponential backoff.
pub fn connect(endpoint: &str) -> Result<TcpStream> {
    let mut last = String::new();
    for attempt in 0..CONNECT_ATTEMPTS {
        match TcpStream::connect(endpoint) {
            Ok(s) => {
                s.set_nodelay(true)?;
                return Ok(s);
            }
            Err(e) => last = e.to_string(),
        }
        if attempt + 1 < CONNECT_ATTEMPTS {
            std::thread::sleep(BACKOFF * 2u32.pow(attempt));
        }
    }
    Err(Error::Connection {
        endpoint: endpoint.to_string(),
        attempts: CONNECT_ATTEMPTS,
        last,
    })
}

/// Client side of an environment session.
#[derive(Debug)]
pub struct BridgeClient<S: Read + Write> {
    stream: S,
    spec: EnvSpec,
    rbuf: Vec<u8>,
    wbuf: Vec<u8>,
    reply: BridgeMessage,
}

impl BridgeClient<TcpStream> {
    pub fn connect(endpoint: &str, batch: u32) -> Result<(Self, ObsFrame)> {
        Self::handshake(connect(endpoint)?, batch)
    }
}

impl<S: Read + Write> BridgeClient<S> {
    /// Sends the opening reset; `batch` 0 accepts whatever the server has.
    pub fn handshake(mut stream: S, batch: u32) -> Result<(Self, ObsFrame)> {
        write_frame(&mut stream, &BridgeMessage::new(Kind::Reset, batch, Vec::new()))?;
        let reply = expect_frame(&mut stream)?;
        if let Some(code) = reply.error_code() {
            return Err(Error::Handshake(format!("server refused: {code:?}")));
        }
        let obs = ObsFrame::from_message(&reply)?;
        let client = BridgeClient {
            stream,
            spec: obs.spec,
            rbuf: Vec::new(),
            wbuf: Vec::new(),
            reply,
        };
        Ok((client, obs))
    }

    pub fn spec(&self) -> EnvSpec {
        self.spec
    }

    pub fn step(&mut self, actions: &[f32]) -> Result<ObsFrame> {
        self.step_as(self.spec.batch, actions)
    }

    /// Steps while declaring batch size `n`; a mismatch is answered with an
    /// error frame and leaves the session usable.
    pub fn step_as(&mut self, n: u32, actions: &[f32]) -> Result<ObsFrame> {
        begin_frame(&mut self.wbuf, Kind::Step, n, actions.len());
        put_f32s(&mut self.wbuf, actions);
        self.stream.write_all(&self.wbuf)?;
        self.stream.flush()?;
        self.receive()
    }

    pub fn reset(&mut self) -> Result<ObsFrame> {
        begin_frame(&mut self.wbuf, Kind::Reset, self.spec.batch, 0);
        self.stream.write_all(&self.wbuf)?;
        self.stream.flush()?;
        self.receive()
    }

    pub fn close(mut self) -> Result<()> {
        write_frame(&mut self.stream, &BridgeMessage::new(Kind::Close, 0, Vec::new()))?;
        let m = expect_frame(&mut self.stream)?;
        if m.kind != Kind::Close {
            return Err(Error::Protocol(format!("expected close, got {:?}", m.kind)));
        }
        Ok(())
    }

    fn receive(&mut self) -> Result<ObsFrame> {
        if !read_frame_bytes(&mut self.stream, &mut self.rbuf)? {
            return Err(Error::Protocol("connection closed".into()));
        }
        let b = &self.rbuf;
        if b.len() >= HEADER_LEN + 4 * SPEC_LEN && b[..4] == MAGIC && b[6] == Kind::Obs as u8 {
            return ObsFrame::from_bytes(b);
        }
        self.reply.decode_from(b)?;
        ObsFrame::from_message(&self.reply)
    }
}

fn expect_frame<R: Read>(r: &mut R) -> Result<BridgeMessage> {
    read_frame(r)?.ok_or_else(|| Error::Protocol("connection closed".into()))?
}

/// A policy served by another process: the harness sends obs frames and
/// reads back step frames with the actions.
#[derive(Debug)]
pub struct RemotePolicy {
    stream: TcpStream,
    endpoint: String,
}

impl RemotePolicy {
    pub fn connect(endpoint: &str) -> Result<Self> {
        Ok(RemotePolicy {
            stream: connect(endpoint)?,
            endpoint: endpoint.to_string(),
        })
    }
}

impl Policy for RemotePolicy {
    fn name(&self) -> String {
        format!("tcp://{}", self.endpoint)
    }

    fn act_batch(&mut self, batch: &EnvBatch, out: &mut [f32]) -> Result<()> {
        write_frame(&mut self.stream, &ObsFrame::of(batch).to_message())?;
        let m = expect_frame(&mut self.stream)?;
        if m.kind != Kind::Step || m.n as usize != batch.len() || m.payload.len() != out.len() {
            return Err(Error::Protocol(format!(
                "policy server answered {:?} with N={} and {} values, expected step with N={} and {}",
                m.kind,
                m.n,
                m.payload.len(),
                batch.len(),
                out.len()
            )));
        }
        out.copy_from_slice(&m.payload);
        Ok(())
    }
}

impl Drop for RemotePolicy {
    fn drop(&mut self) {
        let _ = write_frame(&mut self.stream, &BridgeMessage::new(Kind::Close, 0, Vec::new()));
    }
}

/// Answers obs frames with `act` until the peer closes. The counterpart of
/// [`RemotePolicy`].
pub fn serve_policy<S: Read + Write>(mut stream: S, mut act: impl FnMut(&ObsFrame) -> Vec<f32>) -> Result<u64> {
    let mut served = 0;
    while let Some(m) = read_frame(&mut stream)? {
        let m = m?;
        match m.kind {
            Kind::Close => break,
            Kind::Obs => {
                let obs = ObsFrame::from_message(&m)?;
                let actions = act(&obs);
                write_frame(&mut stream, &BridgeMessage::new(Kind::Step, m.n, actions))?;
                served += 1;
            }
            k => return Err(Error::Protocol(format!("policy server got unexpected {k:?}"))),
        }
    }
    Ok(served)
}

/// In-memory duplex used to run a scripted conversation through
/// [`serve_session`].
struct Scripted {
    input: std::io::Cursor<Vec<u8>>,
    output: Vec<u8>,
}

impl Read for Scripted {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        self.input.read(buf)
    }
}

impl Write for Scripted {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.output.extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

/// The conformance byte stream: a penalty-kick session with two
/// environments on seed 0. Client and server frames alternate, each with
/// its length prefix: reset, obs, zero step, obs, step declaring N=3,
/// error, close, close.
pub fn conformance_stream() -> Result<Vec<u8>> {
    let cfg = sportsim_core::envs::SportConfig::new(Sport::PenaltyKick);
    let mut batch = EnvBatch::new(&cfg, 0, 2, 1)?;
    let requests = [
        BridgeMessage::new(Kind::Reset, 2, Vec::new()),
        BridgeMessage::new(Kind::Step, 2, vec![0.0; batch.action_len()]),
        BridgeMessage::new(Kind::Step, 3, vec![0.0; batch.action_len()]),
        BridgeMessage::new(Kind::Close, 0, Vec::new()),
    ];
    let mut input = Vec::new();
    for r in &requests {
        write_frame(&mut input, r)?;
    }
    let mut s = Scripted {
        input: std::io::Cursor::new(input),
        output: Vec::new(),
    };
    serve_session(&mut s, &mut batch)?;
    let mut replies = std::io::Cursor::new(s.output);
    let mut out = Vec::new();
    for r in &requests {
        write_frame(&mut out, r)?;
        let reply = expect_frame(&mut replies)?;
        write_frame(&mut out, &reply)?;
    }
    Ok(out)
}
