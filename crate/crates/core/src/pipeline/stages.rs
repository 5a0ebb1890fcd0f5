//! The analysis stages, in memory and as file-producing commands.
//!
//! File layout under the output directory:
//!
//! ```text
//! passes/<match>_<period>.jsonl   resolved passes, one JSON object per line
//! passes/summary.json             ingestion counts
//! contexts/<half>.cxt             scaled context (plus <half>.csv on request)
//! bases/<half>.txt, <half>.json   support-filtered canonical basis
//! reports/<index>.csv, .json      search report
//! ```
//!
//! Every artifact has a `.key` sidecar holding a SHA-256 of the stage input
//! and the configuration it depends on; a stage whose key still matches is
//! skipped.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::fca::io::{
    label_basis, read_basis_json, read_cxt, write_basis_json, write_basis_text, write_context_csv,
    write_cxt, ConclusionStyle, LabeledImplication,
};
use crate::fca::{canonical_basis, filter_support, FormalContext, ImplicationBasis};
use crate::ingest::{
    filter_team_passes, infer_receivers, parse_events, read_passes_jsonl, sort_chronologically,
    split_halves, write_passes_jsonl, HalfKey, ParsedEvents, PassEvent,
};
use crate::patterns::{
    search_halves, ConclusionSource, ConclusionString, HalfConclusions, SearchOptions,
    SearchReport,
};
use crate::scaling::{scale_context, ScalingConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfCount {
    pub half: HalfKey,
    pub passes: usize,
    pub dropped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub events: usize,
    pub skipped_records: usize,
    pub team_passes: usize,
    pub resolved: usize,
    pub dropped: usize,
    pub halves: Vec<HalfCount>,
}

#[derive(Clone, Debug, Default)]
pub struct Ingested {
    pub halves: BTreeMap<HalfKey, Vec<PassEvent>>,
    pub summary: IngestSummary,
}

/// Filters, orders and splits parsed events into resolved passes per half.
///
/// Every requested match gets `1H` and `2H` entries even when it has no
/// team passes; other periods appear only when passes exist.
pub fn ingest_events(parsed: &ParsedEvents, cfg: &PipelineConfig) -> Result<Ingested> {
    let wanted: BTreeSet<u64> = cfg.matches.iter().copied().collect();
    let mut events: Vec<_> = parsed
        .events
        .iter()
        .filter(|e| wanted.is_empty() || wanted.contains(&e.match_id))
        .cloned()
        .collect();
    sort_chronologically(&mut events);
    let passes = filter_team_passes(&events, &cfg.pass_filter());
    let inferred = infer_receivers(&events, &passes)?;

    let mut halves = split_halves(&inferred.resolved);
    let mut matches: BTreeSet<u64> = wanted.clone();
    if wanted.is_empty() {
        matches.extend(events.iter().filter(|e| e.team_id == cfg.team_id).map(|e| e.match_id));
    }
    for &m in &matches {
        for period in ["1H", "2H"] {
            halves.entry(HalfKey::new(m, period)).or_default();
        }
    }
    let mut dropped_by_half: BTreeMap<HalfKey, usize> = BTreeMap::new();
    for p in &inferred.unresolved {
        *dropped_by_half.entry(p.half()).or_default() += 1;
        halves.entry(p.half()).or_default();
    }
    if passes.is_empty() {
        log::warn!("no passes found for team {}", cfg.team_id);
    }

    let summary = IngestSummary {
        events: events.len(),
        skipped_records: parsed.skipped.len(),
        team_passes: passes.len(),
        resolved: inferred.resolved.len(),
        dropped: inferred.dropped(),
        halves: halves
            .iter()
            .map(|(h, v)| HalfCount {
                half: h.clone(),
                passes: v.len(),
                dropped: dropped_by_half.get(h).copied().unwrap_or(0),
            })
            .collect(),
    };
    Ok(Ingested { halves, summary })
}

/// One half taken through scaling and basis computation.
#[derive(Clone, Debug)]
pub struct HalfAnalysis {
    pub half: HalfKey,
    pub context: FormalContext,
    pub clamped: usize,
    /// Size of the unfiltered canonical basis.
    pub total_implications: usize,
    /// The basis after the support filter.
    pub basis: ImplicationBasis,
}

impl HalfAnalysis {
    pub fn labeled(&self) -> Vec<LabeledImplication> {
        label_basis(&self.context, &self.basis, ConclusionStyle::Full)
    }

    pub fn conclusions(&self) -> HalfConclusions {
        conclusions_from_labeled(&self.half, &self.labeled())
    }
}

pub fn conclusions_from_labeled(half: &HalfKey, basis: &[LabeledImplication]) -> HalfConclusions {
    HalfConclusions {
        half: half.clone(),
        conclusions: basis
            .iter()
            .enumerate()
            .map(|(i, imp)| {
                ConclusionString::from_labels(
                    imp.conclusion.iter().map(String::as_str),
                    ConclusionSource::new(half, i),
                )
            })
            .collect(),
    }
}

pub fn basis_of(ctx: &FormalContext, min_support: usize, id: &str) -> Result<(usize, ImplicationBasis)> {
    let full = canonical_basis(ctx).with_context_id(id);
    let kept = filter_support(&full, min_support)?;
    Ok((full.len(), kept))
}

pub fn analyze_half(
    half: &HalfKey,
    passes: &[PassEvent],
    scaling: &ScalingConfig,
    min_support: usize,
) -> Result<HalfAnalysis> {
    let scaled = scale_context(passes, scaling)?;
    let (total, basis) = basis_of(&scaled.context, min_support, &half.to_string())?;
    Ok(HalfAnalysis {
        half: half.clone(),
        context: scaled.context,
        clamped: scaled.clamped,
        total_implications: total,
        basis,
    })
}

/// Analyzes the listed halves, one task per half. Halves without passes
/// yield empty analyses.
pub fn analyze_halves(
    ingested: &Ingested,
    halves: &[HalfKey],
    cfg: &PipelineConfig,
) -> Result<Vec<HalfAnalysis>> {
    let empty = Vec::new();
    cfg.execution
        .map(halves, |h| {
            let passes = ingested.halves.get(h).unwrap_or(&empty);
            analyze_half(h, passes, &cfg.scaling, cfg.min_support)
        })
        .into_iter()
        .collect()
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub ingest: IngestSummary,
    pub analyses: Vec<HalfAnalysis>,
    pub report: SearchReport,
}

/// The whole analysis in memory: parse, filter, infer receivers, scale and
/// compute the basis of the index and every target, then search.
pub fn run_pipeline(cfg: &PipelineConfig, index: &HalfKey, targets: &[HalfKey]) -> Result<PipelineRun> {
    cfg.validate()?;
    let events = cfg
        .events_path
        .as_deref()
        .ok_or_else(|| Error::Config("no events file configured".into()))?;
    let parsed = parse_events(events, cfg.parse_mode)?;
    let ingested = ingest_events(&parsed, cfg)?;
    let mut halves = vec![index.clone()];
    halves.extend(targets.iter().cloned());
    let analyses = analyze_halves(&ingested, &halves, cfg)?;
    let conclusions: Vec<HalfConclusions> = analyses.iter().map(HalfAnalysis::conclusions).collect();
    let report = search_halves(
        &conclusions[0],
        &conclusions[1..],
        &cfg.search,
        SearchOptions {
            dedup_hits: cfg.dedup_hits,
            exec: cfg.execution,
        },
    )?;
    Ok(PipelineRun {
        ingest: ingested.summary,
        analyses,
        report,
    })
}

/// Output file locations.
#[derive(Clone, Debug)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn passes(&self, half: &HalfKey) -> PathBuf {
        self.root.join("passes").join(format!("{half}.jsonl"))
    }

    pub fn ingest_summary(&self) -> PathBuf {
        self.root.join("passes").join("summary.json")
    }

    pub fn cxt(&self, half: &HalfKey) -> PathBuf {
        self.root.join("contexts").join(format!("{half}.cxt"))
    }

    pub fn context_csv(&self, half: &HalfKey) -> PathBuf {
        self.root.join("contexts").join(format!("{half}.csv"))
    }

    pub fn basis_text(&self, half: &HalfKey) -> PathBuf {
        self.root.join("bases").join(format!("{half}.txt"))
    }

    pub fn basis_json(&self, half: &HalfKey) -> PathBuf {
        self.root.join("bases").join(format!("{half}.json"))
    }

    pub fn report_csv(&self, index: &HalfKey) -> PathBuf {
        self.root.join("reports").join(format!("{index}.csv"))
    }

    pub fn report_json(&self, index: &HalfKey) -> PathBuf {
        self.root.join("reports").join(format!("{index}.json"))
    }
}

fn key_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".key");
    artifact.with_file_name(name)
}

fn content_key(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn is_fresh(artifacts: &[&Path], key: &str) -> bool {
    artifacts.iter().all(|p| p.is_file())
        && fs::read_to_string(key_path(artifacts[0])).is_ok_and(|k| k.trim() == key)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn json_of<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

/// Parses the events file and writes one pass list per half.
pub fn cmd_ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let events = cfg
        .events_path
        .as_deref()
        .ok_or_else(|| Error::Config("no events file configured".into()))?;
    let bytes = fs::read(events).map_err(|e| Error::io(events, e))?;
    let settings = serde_json::to_vec(&(cfg.pass_filter(), cfg.parse_mode, &cfg.matches)).expect("serializes");
    let key = content_key(&[&bytes, &settings]);
    let summary_path = layout.ingest_summary();
    if is_fresh(&[&summary_path], &key) {
        let summary: IngestSummary = serde_json::from_str(&read_text(&summary_path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", summary_path.display())))?;
        if summary.halves.iter().all(|h| layout.passes(&h.half).is_file()) {
            log::info!("ingest: up to date");
            return Ok(summary);
        }
    }

    let parsed = crate::ingest::parse_events_bytes(events, &bytes, cfg.parse_mode)?;
    drop(bytes);
    let ingested = ingest_events(&parsed, cfg)?;
    for (half, passes) in &ingested.halves {
        write_file(&layout.passes(half), write_passes_jsonl(passes))?;
    }
    write_file(&summary_path, json_of(&ingested.summary))?;
    write_file(&key_path(&summary_path), &key)?;
    log::info!(
        "ingest: {} team passes, {} resolved, {} dropped, {} halves",
        ingested.summary.team_passes,
        ingested.summary.resolved,
        ingested.summary.dropped,
        ingested.halves.len()
    );
    Ok(ingested.summary)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub half: HalfKey,
    pub objects: usize,
    pub attributes: usize,
    pub clamped: usize,
}

/// Scales a half's pass list into a CXT context.
pub fn cmd_scale(cfg: &PipelineConfig, half: &HalfKey) -> Result<ScaleSummary> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let input = layout.passes(half);
    if !input.is_file() {
        return Err(Error::invalid(format!(
            "no pass list for {half} at {}; run ingest first",
            input.display()
        )));
    }
    let text = read_text(&input)?;
    let settings = serde_json::to_vec(&(cfg.scaling, cfg.csv_matrix)).expect("serializes");
    let key = content_key(&[text.as_bytes(), &settings]);
    let out = layout.cxt(half);

    let passes = read_passes_jsonl(&text)?;
    let scaled = scale_context(&passes, &cfg.scaling)?;
    let summary = ScaleSummary {
        half: half.clone(),
        objects: scaled.context.num_objects(),
        attributes: scaled.context.num_attributes(),
        clamped: scaled.clamped,
    };
    let mut artifacts = vec![out.as_path()];
    let csv_path = layout.context_csv(half);
    if cfg.csv_matrix {
        artifacts.push(&csv_path);
    }
    if is_fresh(&artifacts, &key) {
        return Ok(summary);
    }
    write_file(&out, write_cxt(&scaled.context)?)?;
    if cfg.csv_matrix {
        write_file(&csv_path, write_context_csv(&scaled.context)?)?;
    }
    write_file(&key_path(&out), &key)?;
    log::info!(
        "scale {half}: {}x{} context, {} clamped",
        summary.objects,
        summary.attributes,
        summary.clamped
    );
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSummary {
    pub context: String,
    pub implications: usize,
    pub retained: usize,
}

/// Computes the support-filtered basis of any CXT file and writes
/// `<prefix>.txt` and `<prefix>.json`.
pub fn basis_from_cxt(cxt: &Path, prefix: &Path, min_support: usize) -> Result<BasisSummary> {
    let text = read_text(cxt)?;
    let ctx = read_cxt(&text)?;
    let id = prefix.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let (total, kept) = basis_of(&ctx, min_support, &id)?;
    let labeled = label_basis(&ctx, &kept, ConclusionStyle::Full);
    let txt = prefix.with_extension("txt");
    let json = prefix.with_extension("json");
    write_file(&txt, write_basis_text(&labeled)?)?;
    write_file(&json, write_basis_json(&labeled))?;
    let key = content_key(&[text.as_bytes(), &min_support.to_le_bytes()]);
    write_file(&key_path(&json), key)?;
    Ok(BasisSummary {
        context: id,
        implications: total,
        retained: kept.len(),
    })
}

/// Computes the basis of a half's context, scaling it first if needed.
pub fn cmd_basis(cfg: &PipelineConfig, half: &HalfKey) -> Result<BasisSummary> {
    cfg.validate()?;
    let layout = Layout::new(&cfg.out_dir);
    let cxt = layout.cxt(half);
    if !cxt.is_file() {
        if !layout.passes(half).is_file() && cfg.events_path.is_some() {
            cmd_ingest(cfg)?;
        }
        cmd_scale(cfg, half)?;
    }
    let json = layout.basis_json(half);
    let text = read_text(&cxt)?;
    let key = content_key(&[text.as_bytes(), &cfg.min_support.to_le_bytes()]);
    if is_fresh(&[&json, &layout.basis_text(half)], &key) {
        if let Some(summary) = read_basis_summary(&json, half)? {
            return Ok(summary);
        }
    }
    let summary = basis_from_cxt(&cxt, &json.with_extension(""), cfg.min_support)?;
    write_file(&json.with_extension("stats"), json_of(&summary))?;
    log::info!(
        "basis {half}: {} implications, {} with support >= {}",
        summary.implications,
        summary.retained,
        cfg.min_support
    );
    Ok(summary)
}

fn read_basis_summary(json: &Path, half: &HalfKey) -> Result<Option<BasisSummary>> {
    let stats = json.with_extension("stats");
    if !stats.is_file() {
        return Ok(None);
    }
    let summary: BasisSummary = serde_json::from_str(&read_text(&stats)?)
        .map_err(|e| Error::Config(format!("{}: {e}", stats.display())))?;
    Ok((summary.context == half.to_string()).then_some(summary))
}

/// Conclusions of a half, refreshing each upstream artifact that exists
/// (the cache makes this cheap). `None` when the half has no basis and
/// nothing to build one from.
fn half_conclusions(cfg: &PipelineConfig, half: &HalfKey) -> Result<Option<HalfConclusions>> {
    let layout = Layout::new(&cfg.out_dir);
    if layout.passes(half).is_file() {
        cmd_scale(cfg, half)?;
    }
    if layout.cxt(half).is_file() {
        cmd_basis(cfg, half)?;
    }
    let json = layout.basis_json(half);
    if !json.is_file() {
        return Ok(None);
    }
    let labeled = read_basis_json(&read_text(&json)?)?;
    Ok(Some(conclusions_from_labeled(half, &labeled)))
}

/// Searches the index half against the targets and writes the report.
///
/// With an events file configured, ingestion runs first (cached); the
/// halves' bases are then brought up to date concurrently. Halves without
/// data are reported as missing.
pub fn cmd_search(cfg: &PipelineConfig, index: &HalfKey, targets: &[HalfKey]) -> Result<SearchReport> {
    cfg.validate()?;
    if cfg.events_path.is_some() {
        cmd_ingest(cfg)?;
    }
    let layout = Layout::new(&cfg.out_dir);
    let mut all = vec![index.clone()];
    all.extend(targets.iter().cloned());
    let loaded: Vec<HalfConclusions> = cfg
        .execution
        .map(&all, |h| {
            Ok(half_conclusions(cfg, h)?.unwrap_or_else(|| {
                log::warn!("{h}: no data, reported as missing");
                HalfConclusions {
                    half: h.clone(),
                    conclusions: Vec::new(),
                }
            }))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let report = search_halves(
        &loaded[0],
        &loaded[1..],
        &cfg.search,
        SearchOptions {
            dedup_hits: cfg.dedup_hits,
            exec: cfg.execution,
        },
    )?;
    write_file(&layout.report_csv(index), report.to_csv()?)?;
    write_file(&layout.report_json(index), report.to_json())?;
    Ok(report)
}

/// All stages: ingest, scale and basis for every ingested half (in
/// parallel), then the search. Without explicit targets every other
/// ingested half is a target.
pub fn cmd_pipeline(cfg: &PipelineConfig, index: &HalfKey, targets: &[HalfKey]) -> Result<SearchReport> {
    let summary = cmd_ingest(cfg)?;
    let halves: Vec<HalfKey> = summary.halves.iter().map(|h| h.half.clone()).collect();
    let stages: Vec<Result<BasisSummary>> = cfg.execution.map(&halves, |h| {
        cmd_scale(cfg, h)?;
        cmd_basis(cfg, h)
    });
    let mut retained = 0;
    for s in stages {
        retained += s?.retained;
    }
    log::info!("pipeline: {retained} implications retained over {} halves", halves.len());
    let targets: Vec<HalfKey> = if targets.is_empty() {
        halves.into_iter().filter(|h| h != index).collect()
    } else {
        targets.to_vec()
    };
    cmd_search(cfg, index, &targets)
}

/// Halves with a pass list in the output directory, sorted.
pub fn ingested_halves(cfg: &PipelineConfig) -> Result<Vec<HalfKey>> {
    let path = Layout::new(&cfg.out_dir).ingest_summary();
    let summary: IngestSummary = serde_json::from_str(&read_text(&path)?)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(summary.halves.into_iter().map(|h| h.half).collect())
}
