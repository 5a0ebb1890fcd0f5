//! Reading the event, match and player files of the public event dataset.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RawEvent;
use crate::error::{Error, Result};

/// How record-level defects (missing or out-of-range fields) are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseMode {
    /// Skip the record and report it.
    #[default]
    SkipAndReport,
    /// Abort on the first defective record.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedRecord {
    /// Position of the record in the file's top-level array.
    pub record: usize,
    pub event_id: Option<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct ParsedEvents {
    pub events: Vec<RawEvent>,
    pub skipped: Vec<SkippedRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub(crate) struct TagRecord {
    pub id: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

/// One event object as laid out in the dataset. Every field is optional
/// here so that missing fields become record-level errors instead of
/// failing the whole file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct EventRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub team_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub player_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_name: Option<String>,
    #[serde(default)]
    pub sub_event_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_sec: Option<f64>,
    #[serde(default)]
    pub tags: Vec<TagRecord>,
    #[serde(default)]
    pub positions: Vec<Position>,
}

impl EventRecord {
    fn into_event(self) -> std::result::Result<RawEvent, String> {
        let mut missing = Vec::new();
        if self.id.is_none() {
            missing.push("id");
        }
        if self.match_id.is_none() {
            missing.push("matchId");
        }
        if self.team_id.is_none() {
            missing.push("teamId");
        }
        if self.player_id.is_none() {
            missing.push("playerId");
        }
        if self.event_name.is_none() {
            missing.push("eventName");
        }
        if self.match_period.is_none() {
            missing.push("matchPeriod");
        }
        if self.event_sec.is_none() {
            missing.push("eventSec");
        }
        if !missing.is_empty() {
            return Err(format!("missing field(s) {}", missing.join(", ")));
        }
        let event_sec = self.event_sec.unwrap();
        if !(event_sec >= 0.0 && event_sec.is_finite()) {
            return Err(format!("eventSec {event_sec} is negative or not finite"));
        }
        let match_period = self.match_period.unwrap();
        if match_period.is_empty() {
            return Err("matchPeriod is empty".into());
        }
        Ok(RawEvent {
            event_id: self.id.unwrap(),
            match_id: self.match_id.unwrap(),
            team_id: self.team_id.unwrap(),
            player_id: self.player_id.unwrap(),
            event_name: self.event_name.unwrap(),
            sub_event_name: self.sub_event_name.unwrap_or_default(),
            match_period,
            event_sec,
            tags: self.tags.into_iter().map(|t| t.id).collect(),
            positions: self.positions,
        })
    }
}

impl From<&RawEvent> for EventRecord {
    fn from(e: &RawEvent) -> Self {
        EventRecord {
            id: Some(e.event_id),
            match_id: Some(e.match_id),
            team_id: Some(e.team_id),
            player_id: Some(e.player_id),
            event_name: Some(e.event_name.clone()),
            sub_event_name: Some(e.sub_event_name.clone()),
            match_period: Some(e.match_period.clone()),
            event_sec: Some(e.event_sec),
            tags: e.tags.iter().map(|&id| TagRecord { id }).collect(),
            positions: e.positions.clone(),
        }
    }
}

impl RawEvent {
    /// The event as a dataset-shaped JSON object.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EventRecord::from(self)).expect("event serializes")
    }
}

/// Byte offset of a serde_json error position (1-based line and column).
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let mut start = 0;
    for _ in 1..line {
        match bytes[start..].iter().position(|&b| b == b'\n') {
            Some(p) => start += p + 1,
            None => break,
        }
    }
    (start + column.saturating_sub(1)).min(bytes.len())
}

pub(crate) fn json_error(path: &Path, bytes: &[u8], e: serde_json::Error) -> Error {
    Error::Json {
        path: path.to_path_buf(),
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Parses an events file already loaded in memory. `path` only labels
/// errors.
pub fn parse_events_bytes(path: &Path, bytes: &[u8], mode: ParseMode) -> Result<ParsedEvents> {
    let records: Vec<EventRecord> =
        serde_json::from_slice(bytes).map_err(|e| json_error(path, bytes, e))?;
    let mut parsed = ParsedEvents {
        events: Vec::with_capacity(records.len()),
        skipped: Vec::new(),
    };
    for (record, rec) in records.into_iter().enumerate() {
        let event_id = rec.id;
        match rec.into_event() {
            Ok(e) => parsed.events.push(e),
            Err(reason) => match mode {
                ParseMode::Strict => {
                    return Err(Error::Record {
                        path: path.to_path_buf(),
                        record,
                        event_id: event_id.map_or_else(|| "?".into(), |id| id.to_string()),
                        message: reason,
                    })
                }
                ParseMode::SkipAndReport => {
                    log::warn!(
                        "{}: skipping record {record} (event {event_id:?}): {reason}",
                        path.display()
                    );
                    parsed.skipped.push(SkippedRecord {
                        record,
                        event_id,
                        reason,
                    });
                }
            },
        }
    }
    Ok(parsed)
}

pub fn parse_events(path: &Path, mode: ParseMode) -> Result<ParsedEvents> {
    let bytes = read_file(path)?;
    parse_events_bytes(path, &bytes, mode)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchMeta {
    pub match_id: u64,
    pub label: String,
    pub date: String,
    pub team_ids: BTreeSet<u64>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct MatchRecord {
    wy_id: u64,
    #[serde(default)]
    label: String,
    #[serde(default)]
    date: String,
    #[serde(default)]
    dateutc: Option<String>,
    #[serde(default)]
    teams_data: BTreeMap<String, serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct PlayerRecord {
    wy_id: u64,
    #[serde(default)]
    short_name: String,
    #[serde(default)]
    first_name: String,
    #[serde(default)]
    last_name: String,
}

/// Player id to display name. Unknown ids render as the numeric id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlayerNames(BTreeMap<u64, String>);

impl PlayerNames {
    pub fn get(&self, id: u64) -> Option<&str> {
        self.0.get(&id).map(String::as_str)
    }

    pub fn display(&self, id: u64) -> String {
        self.get(id).map_or_else(|| id.to_string(), str::to_string)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn parse_array<T: for<'de> Deserialize<'de>>(path: &Path, bytes: &[u8]) -> Result<Vec<T>> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    serde_json::from_slice(bytes).map_err(|e| json_error(path, bytes, e))
}

pub fn parse_matches_bytes(path: &Path, bytes: &[u8]) -> Result<Vec<MatchMeta>> {
    let records: Vec<MatchRecord> = parse_array(path, bytes)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.wy_id) {
            return Err(Error::invalid(format!(
                "{}: duplicate match wyId {}",
                path.display(),
                r.wy_id
            )));
        }
        let date = match &r.dateutc {
            Some(utc) if utc.len() >= 10 => utc[..10].to_string(),
            _ => r.date,
        };
        out.push(MatchMeta {
            match_id: r.wy_id,
            label: r.label,
            date,
            team_ids: r.teams_data.keys().filter_map(|k| k.parse().ok()).collect(),
        });
    }
    Ok(out)
}

pub fn parse_players_bytes(path: &Path, bytes: &[u8]) -> Result<PlayerNames> {
    let records: Vec<PlayerRecord> = parse_array(path, bytes)?;
    Ok(PlayerNames(
        records
            .into_iter()
            .map(|p| {
                let name = if p.short_name.is_empty() {
                    format!("{} {}", p.first_name, p.last_name).trim().to_string()
                } else {
                    p.short_name
                };
                (p.wy_id, name)
            })
            .collect(),
    ))
}

pub fn load_match_meta(matches: &Path, players: &Path) -> Result<(Vec<MatchMeta>, PlayerNames)> {
    let m = parse_matches_bytes(matches, &read_file(matches)?)?;
    let p = parse_players_bytes(players, &read_file(players)?)?;
    Ok((m, p))
}
