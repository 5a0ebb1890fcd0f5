//! Histogram scaling of timestamped passes into a binary context.
//!
//! Each half is cut into `bins_per_half` bins. A pass received by `r` in bin
//! `b` becomes the attribute `Bin<b>_<r>` of its passer.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fca::{AttributeSet, FormalContext};
use crate::ingest::PassEvent;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverflowPolicy {
    /// Late events go to the last bin and are counted.
    #[default]
    Clamp,
    /// Late events are an error.
    Reject,
}

impl FromStr for OverflowPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(OverflowPolicy::Clamp),
            "reject" => Ok(OverflowPolicy::Reject),
            _ => Err(Error::invalid(format!("overflow policy {s:?} is not clamp|reject"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub bins_per_half: u32,
    pub max_minutes: f64,
    pub overflow: OverflowPolicy,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            bins_per_half: 10,
            max_minutes: 50.0,
            overflow: OverflowPolicy::Clamp,
        }
    }
}

impl ScalingConfig {
    pub fn new(bins_per_half: u32, max_minutes: f64, overflow: OverflowPolicy) -> Result<Self> {
        let cfg = ScalingConfig {
            bins_per_half,
            max_minutes,
            overflow,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins_per_half == 0 {
            return Err(Error::invalid("bins_per_half must be at least 1"));
        }
        if !(self.max_minutes > 0.0 && self.max_minutes.is_finite()) {
            return Err(Error::invalid("max_minutes must be positive"));
        }
        Ok(())
    }

    /// `(bins_per_half - 1) / max_minutes`: bins per minute.
    pub fn bin_factor(&self) -> f64 {
        f64::from(self.bins_per_half - 1) / self.max_minutes
    }

    pub fn last_bin(&self) -> u32 {
        self.bins_per_half - 1
    }
}

// one rounding step: sec * (bins - 1) / (60 * max_minutes)
fn raw_bin(event_sec: f64, cfg: &ScalingConfig) -> f64 {
    (event_sec * f64::from(cfg.bins_per_half - 1) / (60.0 * cfg.max_minutes)).trunc()
}

/// `trunc((event_sec / 60) * bin_factor)`, with overflow handled per policy.
pub fn bin_index(event_sec: f64, cfg: &ScalingConfig) -> Result<u32> {
    cfg.validate()?;
    if event_sec.is_nan() || event_sec < 0.0 || event_sec.is_infinite() {
        return Err(Error::invalid(format!("event time {event_sec} must be a non-negative number")));
    }
    let raw = raw_bin(event_sec, cfg);
    let last = cfg.last_bin();
    if raw <= f64::from(last) {
        return Ok(raw as u32);
    }
    match cfg.overflow {
        OverflowPolicy::Clamp => Ok(last),
        OverflowPolicy::Reject => Err(Error::BinOverflow {
            event_id: None,
            event_sec,
            bin: raw as u64,
            last_bin: last,
        }),
    }
}

/// A receiver in a time bin: one column of the scaled context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScaledAttribute {
    pub receiver_id: String,
    pub bin: u32,
}

impl fmt::Display for ScaledAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bin{}_{}", self.bin, self.receiver_id)
    }
}

impl FromStr for ScaledAttribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("{s:?} is not a Bin<n>_<receiver> label"));
        let (bin, receiver) = s.strip_prefix("Bin").and_then(|r| r.split_once('_')).ok_or_else(bad)?;
        if bin.is_empty() || !bin.bytes().all(|b| b.is_ascii_digit()) || receiver.is_empty() {
            return Err(bad());
        }
        // reject leading zeros so that parsing inverts rendering
        if bin.len() > 1 && bin.starts_with('0') {
            return Err(bad());
        }
        Ok(ScaledAttribute {
            receiver_id: receiver.to_string(),
            bin: bin.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledContext {
    pub context: FormalContext,
    /// Passes moved into the last bin by the clamp policy.
    pub clamped: usize,
}

/// Builds the binary context of one half: passers as objects, `(receiver,
/// bin)` pairs as attributes.
///
/// Passes are taken in `(event_sec, event_id)` order; objects and attributes
/// are numbered by first occurrence in that order. Repeated passes in one
/// bin collapse into a single incidence.
pub fn scale_context(passes: &[PassEvent], cfg: &ScalingConfig) -> Result<ScaledContext> {
    cfg.validate()?;
    if let Some(first) = passes.first() {
        if let Some(other) = passes
            .iter()
            .find(|p| p.match_id != first.match_id || p.period != first.period)
        {
            return Err(Error::invalid(format!(
                "pass {} is from {}, expected {}",
                other.event_id,
                other.half(),
                first.half()
            )));
        }
    }
    let mut ordered: Vec<&PassEvent> = passes.iter().collect();
    ordered.sort_by(|a, b| {
        a.event_sec
            .total_cmp(&b.event_sec)
            .then_with(|| a.event_id.cmp(&b.event_id))
    });

    let mut objects: Vec<String> = Vec::new();
    let mut object_ix: HashMap<u64, usize> = HashMap::new();
    let mut attributes: Vec<String> = Vec::new();
    let mut attribute_ix: HashMap<(u64, u32), usize> = HashMap::new();
    let mut cells: Vec<(usize, usize)> = Vec::with_capacity(ordered.len());
    let mut clamped = 0;

    let last = f64::from(cfg.last_bin());
    for p in ordered {
        let receiver = p.receiver_id.ok_or_else(|| {
            Error::invalid(format!("pass {} has no resolved receiver", p.event_id))
        })?;
        let bin = bin_index(p.event_sec, cfg).map_err(|e| match e {
            Error::BinOverflow {
                event_sec,
                bin,
                last_bin,
                ..
            } => Error::BinOverflow {
                event_id: Some(p.event_id),
                event_sec,
                bin,
                last_bin,
            },
            other => other,
        })?;
        if raw_bin(p.event_sec, cfg) > last {
            clamped += 1;
        }
        let g = *object_ix.entry(p.passer_id).or_insert_with(|| {
            objects.push(p.passer_id.to_string());
            objects.len() - 1
        });
        let m = *attribute_ix.entry((receiver, bin)).or_insert_with(|| {
            attributes.push(
                ScaledAttribute {
                    receiver_id: receiver.to_string(),
                    bin,
                }
                .to_string(),
            );
            attributes.len() - 1
        });
        cells.push((g, m));
    }

    let mut rows = vec![AttributeSet::empty(attributes.len()); objects.len()];
    for (g, m) in cells {
        rows[g].insert(m);
    }
    if clamped > 0 {
        log::warn!("{clamped} pass(es) past {} minutes clamped into the last bin", cfg.max_minutes);
    }
    Ok(ScaledContext {
        context: FormalContext::from_rows(objects, attributes, rows)?,
        clamped,
    })
}
