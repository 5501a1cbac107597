//! Evaluation accumulators, world-record references and metric tables.
//!
//! Sums are kept in integer nanometre (or nanosecond) units so that merging
//! accumulators is exact and the report does not depend on trial order.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::envs::{EpisodeSummary, Sport};
use crate::error::{Error, Result};

/// Version of the CSV layout written by [`MetricReport::to_csv`].
pub const METRICS_SCHEMA: u32 = 1;

const SCALE: f64 = 1e9;

fn fixed(v: f64, what: &str) -> Result<i128> {
    if !v.is_finite() {
        return Err(Error::InvalidState(format!("{what} is not finite")));
    }
    Ok((v * SCALE).round() as i128)
}

/// Running sum with a count of the trials where the quantity was defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sum {
    pub total: i128,
    pub count: u64,
}

impl Sum {
    fn add(&mut self, v: i128) {
        self.total += v;
        self.count += 1;
    }

    fn merge(&mut self, o: &Sum) {
        self.total += o.total;
        self.count += o.count;
    }

    /// Mean in natural units, `None` when nothing was recorded.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.total as f64 / SCALE / self.count as f64)
    }
}

/// Curriculum level seen by an accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LevelTag {
    #[default]
    None,
    /// Every trial so far used this level (bits of the f64).
    Single(u64),
    Mixed,
}

impl LevelTag {
    fn of(level: Option<f64>) -> Self {
        level.map_or(LevelTag::None, |l| LevelTag::Single(l.to_bits()))
    }

    fn join(self, other: LevelTag) -> Self {
        match (self, other) {
            (LevelTag::None, x) | (x, LevelTag::None) => x,
            (LevelTag::Single(a), LevelTag::Single(b)) if a == b => self,
            _ => LevelTag::Mixed,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            LevelTag::Single(b) => Some(f64::from_bits(b)),
            _ => None,
        }
    }
}

/// Per-sport trial accumulator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsAccumulator {
    pub sport: Sport,
    pub trials: u64,
    pub successes: u64,
    pub distance: Sum,
    pub hits: Sum,
    pub error: Sum,
    /// Golf club contacts; `count` is the number of golf trials.
    pub hit_rate: Sum,
    /// Elapsed time over successful trials.
    pub time: Sum,
    pub level: LevelTag,
}

impl MetricsAccumulator {
    pub fn new(sport: Sport) -> Self {
        MetricsAccumulator {
            sport,
            trials: 0,
            successes: 0,
            distance: Sum::default(),
            hits: Sum::default(),
            error: Sum::default(),
            hit_rate: Sum::default(),
            time: Sum::default(),
            level: LevelTag::None,
        }
    }

    /// Adds one finished episode.
    pub fn record_trial(&mut self, s: &EpisodeSummary) -> Result<()> {
        if s.sport != self.sport {
            return Err(Error::Config(format!("{} trial fed to a {} accumulator", s.sport, self.sport)));
        }
        let distance = s.distance.map(|d| fixed(d, "distance")).transpose()?;
        let error = s.error_distance.map(|d| fixed(d, "error distance")).transpose()?;
        let time = fixed(s.time, "time")?;
        self.trials += 1;
        if s.success {
            self.successes += 1;
            self.time.add(time);
        }
        if let Some(d) = distance {
            self.distance.add(d);
        }
        if let Some(h) = s.hits {
            self.hits.add(h as i128 * SCALE as i128);
        }
        if let Some(e) = error {
            self.error.add(e);
        }
        if let Some(h) = s.hit {
            self.hit_rate.add(if h { SCALE as i128 } else { 0 });
        }
        self.level = self.level.join(LevelTag::of(s.level));
        Ok(())
    }

    /// Folds `other` in; equal to having recorded its trials here.
    pub fn merge(&mut self, other: &MetricsAccumulator) -> Result<()> {
        if other.sport != self.sport {
            return Err(Error::Config(format!("cannot merge {} into {}", other.sport, self.sport)));
        }
        self.trials += other.trials;
        self.successes += other.successes;
        self.distance.merge(&other.distance);
        self.hits.merge(&other.hits);
        self.error.merge(&other.error);
        self.hit_rate.merge(&other.hit_rate);
        self.time.merge(&other.time);
        self.level = self.level.join(other.level);
        Ok(())
    }

    pub fn success_rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| 100.0 * self.successes as f64 / self.trials as f64)
    }

    pub fn report(&self) -> MetricReport {
        let row = |metric: Metric, value: Option<f64>, defined: u64| MetricRow {
            metric,
            value,
            defined,
        };
        MetricReport {
            sport: self.sport,
            trials: self.trials,
            level: self.level.value(),
            rows: vec![
                row(Metric::SucRate, self.success_rate(), self.trials),
                row(Metric::AvgDis, self.distance.mean(), self.distance.count),
                row(Metric::AvgHits, self.hits.mean(), self.hits.count),
                row(Metric::ErrorDis, self.error.mean(), self.error.count),
                row(Metric::HitRate, self.hit_rate.mean().map(|r| 100.0 * r), self.hit_rate.count),
                row(Metric::Time, self.time.mean(), self.time.count),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    SucRate,
    AvgDis,
    AvgHits,
    ErrorDis,
    HitRate,
    Time,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::SucRate => "Suc Rate",
            Metric::AvgDis => "Avg Dis",
            Metric::AvgHits => "Avg Hits",
            Metric::ErrorDis => "Error Dis",
            Metric::HitRate => "Hit Rate",
            Metric::Time => "Time",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::SucRate | Metric::HitRate => "%",
            Metric::AvgDis | Metric::ErrorDis => "m",
            Metric::AvgHits => "",
            Metric::Time => "s",
        }
    }

    /// One decimal; rates carry a percent sign.
    pub fn format(self, v: Option<f64>) -> String {
        match v {
            None => "undefined".into(),
            Some(v) if self.unit() == "%" => format!("{v:.1}%"),
            Some(v) => format!("{v:.1}"),
        }
    }
}

/// Columns of the published results tables for each sport.
pub fn table_columns(sport: Sport) -> &'static [Metric] {
    use Metric::*;
    match sport {
        Sport::LongJump | Sport::Javelin | Sport::HighJump => &[SucRate, AvgDis],
        Sport::Hurdling => &[SucRate, AvgDis, Time],
        Sport::Tennis | Sport::TableTennis => &[AvgHits, ErrorDis],
        Sport::Golf => &[HitRate, ErrorDis],
        Sport::PenaltyKick => &[SucRate, ErrorDis],
        Sport::FreeThrow => &[SucRate],
        Sport::Fencing | Sport::Boxing | Sport::SoccerMatch => &[SucRate, AvgHits],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: Metric,
    pub value: Option<f64>,
    /// Trials on which the metric was defined.
    pub defined: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub sport: Sport,
    pub trials: u64,
    pub level: Option<f64>,
    pub rows: Vec<MetricRow>,
}

impl MetricReport {
    pub fn get(&self, m: Metric) -> &MetricRow {
        self.rows.iter().find(|r| r.metric == m).expect("every metric has a row")
    }

    fn label(&self, m: Metric) -> String {
        match (self.sport, m, self.level) {
            (Sport::HighJump, Metric::AvgDis, Some(l)) => format!("Height ({l}m)"),
            (Sport::HighJump, Metric::AvgDis, None) => "Height".into(),
            (Sport::HighJump, Metric::SucRate, Some(l)) => format!("Suc Rate ({l}m)"),
            _ => m.label().into(),
        }
    }

    /// `schema,sport,metric,unit,value,defined,trials` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("schema,sport,metric,unit,value,defined,trials\n");
        for r in &self.rows {
            let v = r.value.map_or("undefined".to_string(), |v| format!("{v:.1}"));
            let _ = writeln!(
                s,
                "{METRICS_SCHEMA},{},{},{},{v},{},{}",
                self.sport,
                self.label(r.metric),
                r.metric.unit(),
                r.defined,
                self.trials
            );
        }
        s
    }

    /// Aligned table of all six metrics.
    pub fn to_text(&self) -> String {
        let title = match RecordBook::for_sport(self.sport) {
            Some(r) => format!("{} ({}{})", self.sport, r.value, r.unit),
            None => self.sport.to_string(),
        };
        let mut s = format!("{title}: {} trials\n", self.trials);
        let w = self.rows.iter().map(|r| self.label(r.metric).len()).max().unwrap_or(0);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:<w$}  {:>10}  (n={})",
                self.label(r.metric),
                r.metric.format(r.value),
                r.defined
            );
        }
        s
    }

    /// One line in the published column layout: header and values joined
    /// with ` | `.
    pub fn table_row(&self) -> (String, String) {
        let cols = table_columns(self.sport);
        let head: Vec<String> = cols.iter().map(|m| self.label(*m)).collect();
        let vals: Vec<String> = cols
            .iter()
            .map(|m| match self.get(*m).value {
                None => "-".into(),
                v => m.format(v),
            })
            .collect();
        (head.join(" | "), vals.join(" | "))
    }
}

/// A reference world record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub value: f64,
    pub unit: &'static str,
    pub lower_is_better: bool,
}

/// World records quoted next to the athletics results.
#[derive(Debug, Clone, Copy)]
pub struct RecordBook;

impl RecordBook {
    pub const LONG_JUMP_M: f64 = 8.95;
    pub const HIGH_JUMP_M: f64 = 2.45;
    pub const HURDLES_110M_S: f64 = 12.8;
    pub const JAVELIN_M: f64 = 104.8;

    pub fn for_sport(sport: Sport) -> Option<Record> {
        let r = |value, unit, lower_is_better| Some(Record { value, unit, lower_is_better });
        match sport {
            Sport::LongJump => r(Self::LONG_JUMP_M, "m", false),
            Sport::HighJump => r(Self::HIGH_JUMP_M, "m", false),
            Sport::Hurdling => r(Self::HURDLES_110M_S, "s", true),
            Sport::Javelin => r(Self::JAVELIN_M, "m", false),
            _ => None,
        }
    }
}
