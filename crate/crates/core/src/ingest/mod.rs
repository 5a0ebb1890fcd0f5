//! Pass events from the match-event dataset: parsing, team/tag filtering,
//! receiver inference and the split into match halves.

mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{
    load_match_meta, parse_events, parse_events_bytes, parse_matches_bytes, parse_players_bytes,
    MatchMeta, ParseMode, ParsedEvents, PlayerNames, Position, SkippedRecord,
};

pub const ACCURATE: u32 = 1801;
pub const NOT_ACCURATE: u32 = 1802;
pub const ASSIST: u32 = 301;
pub const KEY_PASS: u32 = 302;

pub const DEFAULT_TEAM_ID: u64 = 676;
pub const DEFAULT_PASS_TAGS: [u32; 4] = [ACCURATE, NOT_ACCURATE, ASSIST, KEY_PASS];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEvent {
    pub event_id: u64,
    pub match_id: u64,
    pub team_id: u64,
    pub player_id: u64,
    pub event_name: String,
    pub sub_event_name: String,
    pub match_period: String,
    /// Seconds since the start of the current period.
    pub event_sec: f64,
    pub tags: BTreeSet<u32>,
    pub positions: Vec<Position>,
}

impl RawEvent {
    /// Sort key `(match, period, event_sec, event_id)`.
    pub fn chronological_cmp(&self, other: &RawEvent) -> std::cmp::Ordering {
        self.match_id
            .cmp(&other.match_id)
            .then_with(|| self.match_period.cmp(&other.match_period))
            .then_with(|| self.event_sec.total_cmp(&other.event_sec))
            .then_with(|| self.event_id.cmp(&other.event_id))
    }
}

pub fn sort_chronologically(events: &mut [RawEvent]) {
    events.sort_by(RawEvent::chronological_cmp);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassEvent {
    pub match_id: u64,
    pub period: String,
    pub passer_id: u64,
    /// `None` when no receiver could be inferred.
    pub receiver_id: Option<u64>,
    pub event_sec: f64,
    pub tags: BTreeSet<u32>,
    pub event_id: u64,
}

impl PassEvent {
    pub fn half(&self) -> HalfKey {
        HalfKey::new(self.match_id, self.period.clone())
    }
}

/// One period of one match, e.g. `2565554_1H`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfKey {
    pub match_id: u64,
    pub period: String,
}

impl HalfKey {
    pub fn new(match_id: u64, period: impl Into<String>) -> Self {
        HalfKey {
            match_id,
            period: period.into(),
        }
    }
}

impl fmt::Display for HalfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.match_id, self.period)
    }
}

impl FromStr for HalfKey {
    type Err = Error;

    /// Accepts `MATCH:PERIOD` or `MATCH_PERIOD`.
    fn from_str(s: &str) -> Result<Self> {
        let (m, p) = s
            .split_once(':')
            .or_else(|| s.split_once('_'))
            .ok_or_else(|| Error::invalid(format!("half {s:?} is not MATCH:PERIOD")))?;
        let match_id = m
            .parse()
            .map_err(|_| Error::invalid(format!("half {s:?}: bad match id")))?;
        if p.is_empty() || p.contains(['/', '\\', '_', ':']) {
            return Err(Error::invalid(format!("half {s:?}: bad period")));
        }
        Ok(HalfKey::new(match_id, p))
    }
}

/// Which events count as team passes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassFilter {
    pub team_id: u64,
    pub tags: BTreeSet<u32>,
}

impl Default for PassFilter {
    fn default() -> Self {
        PassFilter {
            team_id: DEFAULT_TEAM_ID,
            tags: DEFAULT_PASS_TAGS.into_iter().collect(),
        }
    }
}

impl PassFilter {
    pub fn accepts(&self, e: &RawEvent) -> bool {
        e.event_name == "Pass" && e.team_id == self.team_id && !e.tags.is_disjoint(&self.tags)
    }
}

/// Pass events of the filter's team carrying at least one of its tags, in
/// input order.
pub fn filter_team_passes(events: &[RawEvent], filter: &PassFilter) -> Vec<RawEvent> {
    events.iter().filter(|e| filter.accepts(e)).cloned().collect()
}

#[derive(Clone, Debug, Default)]
pub struct ReceiverInference {
    pub resolved: Vec<PassEvent>,
    /// Passes whose next event is in another period, belongs to the other
    /// team, or is by the passer again.
    pub unresolved: Vec<PassEvent>,
}

impl ReceiverInference {
    pub fn dropped(&self) -> usize {
        self.unresolved.len()
    }
}

/// Attributes each pass to the player of the event that follows it.
///
/// `all_events` must be in chronological order (see
/// [`sort_chronologically`]) and contain every pass. The receiver is the
/// player of the next event when that event is in the same match and
/// period, is by the same team, and is not by the passer.
pub fn infer_receivers(all_events: &[RawEvent], passes: &[RawEvent]) -> Result<ReceiverInference> {
    if let Some(w) = all_events
        .windows(2)
        .find(|w| w[0].chronological_cmp(&w[1]).is_gt())
    {
        return Err(Error::invalid(format!(
            "events not in chronological order at event {}",
            w[1].event_id
        )));
    }
    let position: HashMap<u64, usize> = all_events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.event_id, i))
        .collect();
    let mut out = ReceiverInference::default();
    for pass in passes {
        let &i = position
            .get(&pass.event_id)
            .ok_or_else(|| Error::invalid(format!("pass {} not in the event stream", pass.event_id)))?;
        let receiver = all_events.get(i + 1).and_then(|next| {
            let same_period = next.match_id == pass.match_id && next.match_period == pass.match_period;
            (same_period && next.team_id == pass.team_id && next.player_id != pass.player_id)
                .then_some(next.player_id)
        });
        let event = PassEvent {
            match_id: pass.match_id,
            period: pass.match_period.clone(),
            passer_id: pass.player_id,
            receiver_id: receiver,
            event_sec: pass.event_sec,
            tags: pass.tags.clone(),
            event_id: pass.event_id,
        };
        if receiver.is_some() {
            out.resolved.push(event);
        } else {
            out.unresolved.push(event);
        }
    }
    Ok(out)
}

/// Groups passes by match half, keeping their relative order.
pub fn split_halves(passes: &[PassEvent]) -> BTreeMap<HalfKey, Vec<PassEvent>> {
    let mut out: BTreeMap<HalfKey, Vec<PassEvent>> = BTreeMap::new();
    for p in passes {
        out.entry(p.half()).or_default().push(p.clone());
    }
    out
}

pub fn write_passes_jsonl(passes: &[PassEvent]) -> String {
    let mut out = String::new();
    for p in passes {
        out.push_str(&serde_json::to_string(p).expect("pass serializes"));
        out.push('\n');
    }
    out
}

pub fn read_passes_jsonl(text: &str) -> Result<Vec<PassEvent>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Format {
                what: "pass list",
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
