//! Sport identifiers, arena constants, curriculum and per-sport configuration
//! loaded from TOML.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{ProxyConfig, WorldConfig};
use crate::rewards::{
    CombatWeights, FreeThrowWeights, GolfWeights, HighJumpWeights, JavelinWeights, LongJumpWeights,
    PenaltyKickWeights, RacketWeights, SoccerMatchWeights,
};
use crate::skeleton::SkeletonSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sport {
    HighJump,
    LongJump,
    Hurdling,
    Golf,
    Javelin,
    Tennis,
    TableTennis,
    Fencing,
    Boxing,
    PenaltyKick,
    SoccerMatch,
    FreeThrow,
}

impl Sport {
    pub const ALL: [Sport; 12] = [
        Sport::HighJump,
        Sport::LongJump,
        Sport::Hurdling,
        Sport::Golf,
        Sport::Javelin,
        Sport::Tennis,
        Sport::TableTennis,
        Sport::Fencing,
        Sport::Boxing,
        Sport::PenaltyKick,
        Sport::SoccerMatch,
        Sport::FreeThrow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sport::HighJump => "high_jump",
            Sport::LongJump => "long_jump",
            Sport::Hurdling => "hurdling",
            Sport::Golf => "golf",
            Sport::Javelin => "javelin",
            Sport::Tennis => "tennis",
            Sport::TableTennis => "table_tennis",
            Sport::Fencing => "fencing",
            Sport::Boxing => "boxing",
            Sport::PenaltyKick => "penalty_kick",
            Sport::SoccerMatch => "soccer_match",
            Sport::FreeThrow => "free_throw",
        }
    }

    /// Two-sided sports where each side has its own reward stream.
    pub fn is_competitive(self) -> bool {
        matches!(self, Sport::Fencing | Sport::Boxing | Sport::SoccerMatch)
    }

    fn default_time_limit(self) -> f64 {
        match self {
            Sport::HighJump | Sport::LongJump | Sport::Hurdling | Sport::Golf | Sport::Javelin => 30.0,
            Sport::Tennis | Sport::TableTennis | Sport::Fencing | Sport::Boxing => 60.0,
            Sport::PenaltyKick | Sport::FreeThrow => 40.0,
            Sport::SoccerMatch => 120.0,
        }
    }

    fn default_curriculum(self) -> CurriculumMode {
        match self {
            Sport::HighJump => CurriculumMode::Ladder {
                levels: vec![0.5, 1.0, 1.5, 2.0],
            },
            Sport::Hurdling => CurriculumMode::Uniform { lo: 0.0, hi: 1.167 },
            _ => CurriculumMode::Off,
        }
    }
}

impl fmt::Display for Sport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sport {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Sport::ALL
            .iter()
            .copied()
            .find(|sp| sp.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown sport `{s}`")))
    }
}

// ---------------------------------------------------------------- arena

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackArena {
    pub first_hurdle: f64,
    pub hurdle_spacing: f64,
    pub hurdle_count: usize,
    pub finish: f64,
    pub hurdle_height: f64,
    pub lane_width: f64,
    /// High-jump bar centre (x ahead, y left of the start).
    pub bar_center: [f64; 2],
    pub bar_width: f64,
    pub bar_thickness: f64,
    pub high_jump_goal: [f64; 3],
    pub long_jump_line: f64,
    pub long_jump_goal: [f64; 3],
    /// Half-width of the run-up corridor for the jumps.
    pub runway_half_width: f64,
}

impl Default for TrackArena {
    fn default() -> Self {
        TrackArena {
            first_hurdle: 13.72,
            hurdle_spacing: 9.14,
            hurdle_count: 10,
            finish: 110.0,
            hurdle_height: 1.067,
            lane_width: 1.22,
            bar_center: [20.0, 6.0],
            bar_width: 4.0,
            bar_thickness: 0.03,
            high_jump_goal: crate::rewards::HIGH_JUMP_GOAL,
            long_jump_line: 20.0,
            long_jump_goal: crate::rewards::LONG_JUMP_GOAL,
            runway_half_width: 3.0,
        }
    }
}

impl TrackArena {
    /// x positions of every hurdle.
    pub fn hurdle_positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.hurdle_count).map(|k| self.first_hurdle + self.hurdle_spacing * k as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GolfArena {
    pub target_range: [f64; 2],
    pub amplitude: f64,
    pub wavelength: f64,
    pub patch_spacing: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub restitution: f64,
    pub club_half_extents: [f64; 3],
    /// Club head centre ahead of the right hand, in the hand frame.
    pub club_reach: f64,
    pub too_close: f64,
    pub contact_timeout: f64,
    /// Backward travel that ends the episode after contact.
    pub backward_limit: f64,
    /// Ball must stay inside this box.
    pub bounds: [f64; 4],
}

impl Default for GolfArena {
    fn default() -> Self {
        GolfArena {
            target_range: [0.0, 20.0],
            amplitude: 0.5,
            wavelength: 8.0,
            patch_spacing: 0.5,
            ball_radius: 0.0214,
            ball_mass: 0.046,
            restitution: 0.5,
            club_half_extents: [0.025, 0.0125, 0.01],
            club_reach: 0.3,
            too_close: 0.3,
            contact_timeout: 2.0,
            backward_limit: 0.5,
            bounds: [-10.0, -15.0, 40.0, 15.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JavelinArena {
    pub length: f64,
    pub radius: f64,
    pub mass: f64,
    /// Pre-release distance from the hand that counts as detached, and
    /// post-release distance that counts as never thrown.
    pub hand_radius: f64,
    /// Squared 6-DoF pose error allowed before release.
    pub pose_tolerance: f64,
    pub field_half_width: f64,
}

impl Default for JavelinArena {
    fn default() -> Self {
        JavelinArena {
            length: 2.7,
            radius: 0.015,
            mass: 0.8,
            hand_radius: 0.3,
            pose_tolerance: 1.0,
            field_half_width: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TennisArena {
    pub court: [f64; 2],
    pub net_height: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub restitution: f64,
    pub launch_speed: [f64; 2],
    pub launch_height: f64,
    pub racket_offset: f64,
    pub racket_radius: f64,
    /// Run-off allowed around the agent's half.
    pub runoff: f64,
}

impl Default for TennisArena {
    fn default() -> Self {
        TennisArena {
            court: [23.77, 8.23],
            net_height: 1.0,
            ball_radius: 0.032,
            ball_mass: 0.057,
            restitution: 0.75,
            launch_speed: [12.0, 22.0],
            launch_height: 1.5,
            racket_offset: 0.35,
            racket_radius: 0.15,
            runoff: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableArena {
    /// Length, width, height.
    pub table: [f64; 3],
    pub net_height: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub restitution: f64,
    pub launch_speed: [f64; 2],
    pub launch_height: f64,
    pub paddle_offset: f64,
    pub paddle_radius: f64,
    pub runoff: f64,
}

impl Default for TableArena {
    fn default() -> Self {
        TableArena {
            table: [2.74, 1.525, 0.76],
            net_height: 0.1525,
            ball_radius: 0.02,
            ball_mass: 0.0027,
            restitution: 0.9,
            launch_speed: [3.0, 7.0],
            launch_height: 1.0,
            paddle_offset: 0.12,
            paddle_radius: 0.08,
            runoff: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombatArena {
    pub piste: [f64; 2],
    pub ring: [f64; 2],
    pub sword_length: f64,
    pub sword_radius: f64,
    pub glove_radius: f64,
    /// Starting distance between the two roots.
    pub fencing_gap: f64,
    pub boxing_gap: f64,
}

impl Default for CombatArena {
    fn default() -> Self {
        CombatArena {
            piste: [14.0, 2.0],
            ring: [5.0, 5.0],
            sword_length: 0.9,
            sword_radius: 0.01,
            glove_radius: 0.08,
            fencing_gap: 4.0,
            boxing_gap: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoccerArena {
    pub field: [f64; 2],
    pub goal: [f64; 2],
    pub agent_from_goal: f64,
    pub ball_from_goal: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub restitution: f64,
    pub foot_radius: f64,
    pub foot_restitution: f64,
    /// Players per side in the match.
    pub team_size: usize,
}

impl Default for SoccerArena {
    fn default() -> Self {
        SoccerArena {
            field: [32.0, 20.0],
            goal: [4.0, 2.0],
            agent_from_goal: 13.0,
            ball_from_goal: 12.0,
            ball_radius: 0.0575,
            ball_mass: 0.45,
            restitution: 0.6,
            foot_radius: 0.06,
            foot_restitution: 0.6,
            team_size: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasketballArena {
    pub court: [f64; 2],
    pub hoop_height: f64,
    pub free_throw_distance: f64,
    pub rim_radius: f64,
    pub ball_radius: f64,
    pub ball_mass: f64,
    pub restitution: f64,
}

impl Default for BasketballArena {
    fn default() -> Self {
        BasketballArena {
            court: [29.0, 15.0],
            hoop_height: 3.0,
            free_throw_distance: 4.5,
            rim_radius: 0.2286,
            ball_radius: 0.12,
            ball_mass: 0.62,
            restitution: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Arena {
    pub track: TrackArena,
    pub golf: GolfArena,
    pub javelin: JavelinArena,
    pub tennis: TennisArena,
    pub table_tennis: TableArena,
    pub combat: CombatArena,
    pub soccer: SoccerArena,
    pub basketball: BasketballArena,
}

// ---------------------------------------------------------------- weights

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub high_jump: HighJumpWeights,
    pub long_jump: LongJumpWeights,
    pub hurdling: f64,
    pub golf: GolfWeights,
    pub javelin: JavelinWeights,
    pub racket: RacketWeights,
    pub combat: CombatWeights,
    pub penalty_kick: PenaltyKickWeights,
    pub soccer_match: SoccerMatchWeights,
    pub free_throw: FreeThrowWeights,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            high_jump: Default::default(),
            long_jump: Default::default(),
            hurdling: 1.0,
            golf: Default::default(),
            javelin: Default::default(),
            racket: Default::default(),
            combat: Default::default(),
            penalty_kick: Default::default(),
            soccer_match: Default::default(),
            free_throw: Default::default(),
        }
    }
}

// ---------------------------------------------------------------- curriculum

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CurriculumMode {
    /// One level drawn uniformly per episode.
    Ladder { levels: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    Fixed { value: f64 },
    /// The sport's nominal value.
    Off,
}

/// Unknown keys are rejected by [`SportConfig::from_toml`]; serde cannot
/// do it through the flattened mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurriculumConfig {
    #[serde(flatten)]
    pub mode: CurriculumMode,
    /// Mixed into the per-episode stream so curricula can be varied without
    /// changing spawns.
    pub seed: u64,
}

impl Default for CurriculumConfig {
    fn default() -> Self {
        CurriculumConfig {
            mode: CurriculumMode::Off,
            seed: 0,
        }
    }
}

impl CurriculumConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            CurriculumMode::Ladder { levels } => {
                if levels.is_empty() || levels.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Config(format!(
                        "curriculum ladder must be non-empty and strictly increasing, got {levels:?}"
                    )));
                }
                if levels.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::Config("curriculum levels must be finite and ≥ 0".into()));
                }
            }
            CurriculumMode::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo <= hi) {
                    return Err(Error::Config(format!("curriculum range must satisfy 0 ≤ lo ≤ hi, got [{lo}, {hi}]")));
                }
            }
            CurriculumMode::Fixed { value } => {
                if !(value.is_finite() && *value >= 0.0) {
                    return Err(Error::Config(format!("fixed curriculum value {value} must be ≥ 0")));
                }
            }
            CurriculumMode::Off => {}
        }
        Ok(())
    }

    /// Draws one level; `nominal` is returned when the curriculum is off.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, nominal: f64) -> f64 {
        match &self.mode {
            CurriculumMode::Ladder { levels } => levels[rng.random_range(0..levels.len())],
            CurriculumMode::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.random_range(*lo..=*hi)
                }
            }
            CurriculumMode::Fixed { value } => *value,
            CurriculumMode::Off => nominal,
        }
    }
}

// ---------------------------------------------------------------- sport config

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkeletonKind {
    #[default]
    Smpl,
    Smplx,
}

impl SkeletonKind {
    pub fn spec(self) -> SkeletonSpec {
        match self {
            SkeletonKind::Smpl => SkeletonSpec::smpl(),
            SkeletonKind::Smplx => SkeletonSpec::smplx(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SportConfig {
    pub sport: Sport,
    #[serde(default)]
    pub skeleton: SkeletonKind,
    #[serde(default)]
    pub arena: Arena,
    #[serde(default)]
    pub weights: RewardWeights,
    #[serde(default = "CurriculumConfig::default")]
    pub curriculum: CurriculumConfig,
    /// Episode length limit, seconds.
    pub time_limit: f64,
    #[serde(default)]
    pub proxy: ProxyConfig,
    #[serde(default)]
    pub world: WorldConfig,
}

#[derive(Deserialize)]
struct RawConfig {
    sport: Sport,
    #[serde(flatten)]
    rest: toml::Table,
}

impl SportConfig {
    /// Defaults for `sport`.
    pub fn new(sport: Sport) -> Self {
        SportConfig {
            sport,
            skeleton: SkeletonKind::Smpl,
            arena: Arena::default(),
            weights: RewardWeights::default(),
            curriculum: CurriculumConfig {
                mode: sport.default_curriculum(),
                seed: 0,
            },
            time_limit: sport.default_time_limit(),
            proxy: ProxyConfig::default(),
            world: WorldConfig::default(),
        }
    }

    /// Parses a TOML document. Missing keys take the sport's defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(toml::Value::Table(c)) = raw.rest.get("curriculum") {
            const KEYS: [&str; 6] = ["mode", "seed", "levels", "lo", "hi", "value"];
            if let Some(k) = c.keys().find(|k| !KEYS.contains(&k.as_str())) {
                return Err(Error::Config(format!("unknown curriculum key `{k}`")));
            }
        }
        let base = toml::Table::try_from(SportConfig::new(raw.sport)).map_err(|e| Error::Config(e.to_string()))?;
        let mut merged = base;
        merge(&mut merged, raw.rest);
        merged.insert("sport".into(), toml::Value::String(raw.sport.name().into()));
        let cfg: SportConfig = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.arena;
        let t = &a.track;
        let positive: &[(&str, f64)] = &[
            ("track.first_hurdle", t.first_hurdle),
            ("track.hurdle_spacing", t.hurdle_spacing),
            ("track.finish", t.finish),
            ("track.hurdle_height", t.hurdle_height),
            ("track.lane_width", t.lane_width),
            ("track.bar_width", t.bar_width),
            ("track.bar_thickness", t.bar_thickness),
            ("track.long_jump_line", t.long_jump_line),
            ("track.runway_half_width", t.runway_half_width),
            ("golf.amplitude", a.golf.amplitude),
            ("golf.wavelength", a.golf.wavelength),
            ("golf.patch_spacing", a.golf.patch_spacing),
            ("golf.ball_radius", a.golf.ball_radius),
            ("golf.ball_mass", a.golf.ball_mass),
            ("golf.club_reach", a.golf.club_reach),
            ("golf.too_close", a.golf.too_close),
            ("golf.contact_timeout", a.golf.contact_timeout),
            ("javelin.length", a.javelin.length),
            ("javelin.radius", a.javelin.radius),
            ("javelin.mass", a.javelin.mass),
            ("javelin.hand_radius", a.javelin.hand_radius),
            ("javelin.pose_tolerance", a.javelin.pose_tolerance),
            ("tennis.court.length", a.tennis.court[0]),
            ("tennis.court.width", a.tennis.court[1]),
            ("tennis.net_height", a.tennis.net_height),
            ("tennis.ball_radius", a.tennis.ball_radius),
            ("tennis.launch_speed.min", a.tennis.launch_speed[0]),
            ("tennis.racket_radius", a.tennis.racket_radius),
            ("table_tennis.length", a.table_tennis.table[0]),
            ("table_tennis.width", a.table_tennis.table[1]),
            ("table_tennis.height", a.table_tennis.table[2]),
            ("table_tennis.net_height", a.table_tennis.net_height),
            ("table_tennis.ball_radius", a.table_tennis.ball_radius),
            ("table_tennis.launch_speed.min", a.table_tennis.launch_speed[0]),
            ("combat.piste.length", a.combat.piste[0]),
            ("combat.piste.width", a.combat.piste[1]),
            ("combat.ring.length", a.combat.ring[0]),
            ("combat.ring.width", a.combat.ring[1]),
            ("combat.sword_length", a.combat.sword_length),
            ("combat.glove_radius", a.combat.glove_radius),
            ("soccer.field.length", a.soccer.field[0]),
            ("soccer.field.width", a.soccer.field[1]),
            ("soccer.goal.width", a.soccer.goal[0]),
            ("soccer.goal.height", a.soccer.goal[1]),
            ("soccer.agent_from_goal", a.soccer.agent_from_goal),
            ("soccer.ball_from_goal", a.soccer.ball_from_goal),
            ("soccer.ball_radius", a.soccer.ball_radius),
            ("basketball.court.length", a.basketball.court[0]),
            ("basketball.court.width", a.basketball.court[1]),
            ("basketball.hoop_height", a.basketball.hoop_height),
            ("basketball.free_throw_distance", a.basketball.free_throw_distance),
            ("basketball.rim_radius", a.basketball.rim_radius),
            ("basketball.ball_radius", a.basketball.ball_radius),
            ("time_limit", self.time_limit),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("{name} must be positive, got {v}")));
        }
        if t.hurdle_count == 0 {
            return Err(Error::Config("at least one hurdle is required".into()));
        }
        let last = t.first_hurdle + t.hurdle_spacing * (t.hurdle_count - 1) as f64;
        if last >= t.finish {
            return Err(Error::Config(format!("last hurdle at {last} m is not before the finish at {} m", t.finish)));
        }
        if a.tennis.launch_speed[0] > a.tennis.launch_speed[1] || a.table_tennis.launch_speed[0] > a.table_tennis.launch_speed[1] {
            return Err(Error::Config("launch speed band must satisfy min ≤ max".into()));
        }
        if a.golf.target_range[0] < 0.0 || a.golf.target_range[0] > a.golf.target_range[1] {
            return Err(Error::Config("golf target range must satisfy 0 ≤ min ≤ max".into()));
        }
        if !(1..=4).contains(&a.soccer.team_size) {
            return Err(Error::Config(format!("soccer team size {} outside 1..=4", a.soccer.team_size)));
        }
        if a.soccer.ball_from_goal >= a.soccer.agent_from_goal + 5.0 || a.soccer.ball_from_goal >= a.soccer.field[0] {
            return Err(Error::Config("soccer spawn distances do not fit the field".into()));
        }
        self.curriculum.validate()?;
        Ok(())
    }

    /// Number of controlled agents in one environment.
    pub fn agent_count(&self) -> usize {
        match self.sport {
            Sport::Fencing | Sport::Boxing => 2,
            Sport::SoccerMatch => 2 * self.arena.soccer.team_size,
            _ => 1,
        }
    }

    pub fn skeleton_spec(&self) -> SkeletonSpec {
        self.skeleton.spec()
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            // A new curriculum mode brings its own parameter set.
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !o.contains_key("mode") => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
