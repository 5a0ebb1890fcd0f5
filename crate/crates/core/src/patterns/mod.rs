//! Searching implication conclusions of one half against other halves.

mod distance;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fca::{AttributeSet, FormalContext};
use crate::ingest::HalfKey;

pub use distance::{
    edit_distance_sub2, similarity_ratio, sort_tokens, token_sort_ratio, IndelMatcher,
};

/// Where a conclusion came from: its half and its position in that half's
/// filtered basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConclusionSource {
    pub match_id: u64,
    pub period: String,
    pub index: usize,
}

impl ConclusionSource {
    pub fn new(half: &HalfKey, index: usize) -> Self {
        ConclusionSource {
            match_id: half.match_id,
            period: half.period.clone(),
            index,
        }
    }

    pub fn half(&self) -> HalfKey {
        HalfKey::new(self.match_id, self.period.clone())
    }
}

/// A conclusion as text: distinct labels in byte order, single-space joined.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConclusionString {
    pub text: String,
    pub source: ConclusionSource,
}

impl ConclusionString {
    pub fn from_labels<'a, I>(labels: I, source: ConclusionSource) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let distinct: BTreeSet<&str> = labels.into_iter().collect();
        let mut text = String::new();
        for (i, label) in distinct.into_iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(label);
        }
        ConclusionString { text, source }
    }
}

pub fn stringify_conclusion(
    conclusion: &AttributeSet,
    ctx: &FormalContext,
    source: ConclusionSource,
) -> Result<ConclusionString> {
    if conclusion.universe() != ctx.num_attributes() {
        return Err(Error::invalid("conclusion does not belong to this context"));
    }
    Ok(ConclusionString::from_labels(ctx.attribute_labels(conclusion), source))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub score_cutoff: u8,
    pub limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            score_cutoff: 75,
            limit: 10,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.score_cutoff > 100 {
            return Err(Error::invalid("score_cutoff must be within 0..=100"));
        }
        if self.limit == 0 {
            return Err(Error::invalid("limit must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityMatch {
    pub query: ConclusionString,
    pub target: ConclusionString,
    pub ratio: u8,
}

/// Scores each choice against the query, keeps ratios `>= score_cutoff`, and
/// returns the best `limit` of them, highest first. Equal ratios keep the
/// order of `choices`.
pub fn extract_similar(
    query: &ConclusionString,
    choices: &[ConclusionString],
    cfg: &SearchConfig,
) -> Result<Vec<SimilarityMatch>> {
    cfg.validate()?;
    let normalized: Vec<String> = choices.iter().map(|c| sort_tokens(&c.text)).collect();
    Ok(ranked(query, choices, &normalized, cfg)
        .into_iter()
        .map(|(i, ratio)| SimilarityMatch {
            query: query.clone(),
            target: choices[i].clone(),
            ratio,
        })
        .collect())
}

/// Indices and ratios of the retained choices. `normalized[i]` is the
/// token-sorted text of `choices[i]`.
fn ranked(
    query: &ConclusionString,
    choices: &[ConclusionString],
    normalized: &[String],
    cfg: &SearchConfig,
) -> Vec<(usize, u8)> {
    debug_assert_eq!(choices.len(), normalized.len());
    let matcher = IndelMatcher::new(&sort_tokens(&query.text));
    let mut hits: Vec<(usize, u8)> = normalized
        .iter()
        .enumerate()
        .map(|(i, text)| (i, matcher.ratio(text)))
        .filter(|&(_, r)| r >= cfg.score_cutoff)
        .collect();
    // stable: ties stay in input order
    hits.sort_by_key(|&(_, r)| std::cmp::Reverse(r));
    hits.truncate(cfg.limit);
    hits
}

/// The conclusions of one half's filtered basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfConclusions {
    pub half: HalfKey,
    pub conclusions: Vec<ConclusionString>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSection {
    pub half: HalfKey,
    pub conclusions: usize,
    /// No conclusions were available for this half (no passes or no basis).
    pub missing: bool,
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub text: String,
    pub index: usize,
    pub ratio: u8,
}

/// The retained hits of one query conclusion in one target half.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitGroup {
    pub query: ConclusionString,
    pub target: HalfKey,
    pub matches: Vec<Hit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub index: HalfKey,
    pub queries: usize,
    pub config: SearchConfig,
    pub targets: Vec<TargetSection>,
    /// Ordered by query position, then target order.
    pub groups: Vec<HitGroup>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Drop a hit whose (query text, target half, target text) was already
    /// reported for an earlier query.
    pub dedup_hits: bool,
    pub exec: Execution,
}

/// Searches every index conclusion against every target half.
pub fn search_halves(
    index: &HalfConclusions,
    targets: &[HalfConclusions],
    cfg: &SearchConfig,
    opts: SearchOptions,
) -> Result<SearchReport> {
    cfg.validate()?;
    let normalized: Vec<Vec<String>> = targets
        .iter()
        .map(|t| t.conclusions.iter().map(|c| sort_tokens(&c.text)).collect())
        .collect();

    let per_query: Vec<Vec<HitGroup>> = opts.exec.map(&index.conclusions, |query| {
        targets
            .iter()
            .zip(&normalized)
            .map(|(target, norm)| HitGroup {
                query: query.clone(),
                target: target.half.clone(),
                matches: ranked(query, &target.conclusions, norm, cfg)
                    .into_iter()
                    .map(|(i, ratio)| Hit {
                        text: target.conclusions[i].text.clone(),
                        index: target.conclusions[i].source.index,
                        ratio,
                    })
                    .collect(),
            })
            .collect()
    });

    let mut seen: HashSet<(String, HalfKey, String)> = HashSet::new();
    let mut groups = Vec::new();
    for mut group in per_query.into_iter().flatten() {
        if opts.dedup_hits {
            group.matches.retain(|hit| {
                seen.insert((group.query.text.clone(), group.target.clone(), hit.text.clone()))
            });
        }
        if !group.matches.is_empty() {
            groups.push(group);
        }
    }

    let sections = targets
        .iter()
        .map(|t| TargetSection {
            half: t.half.clone(),
            conclusions: t.conclusions.len(),
            missing: t.conclusions.is_empty(),
            hits: groups
                .iter()
                .filter(|g| g.target == t.half)
                .map(|g| g.matches.len())
                .sum(),
        })
        .collect();

    Ok(SearchReport {
        index: index.half.clone(),
        queries: index.conclusions.len(),
        config: *cfg,
        targets: sections,
        groups,
    })
}

impl SearchReport {
    /// Flat rows `(query_text, target_match, target_period, target_text, ratio)`.
    pub fn rows(&self) -> impl Iterator<Item = (&str, u64, &str, &str, u8)> {
        self.groups.iter().flat_map(|g| {
            g.matches.iter().map(move |h| {
                (
                    g.query.text.as_str(),
                    g.target.match_id,
                    g.target.period.as_str(),
                    h.text.as_str(),
                    h.ratio,
                )
            })
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        w.write_record(["query_text", "target_match", "target_period", "target_text", "ratio"])
            .map_err(err)?;
        for (q, m, p, t, r) in self.rows() {
            w.write_record([q, &m.to_string(), p, t, &r.to_string()]).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fca::FormalContext;

    fn src(i: usize) -> ConclusionSource {
        ConclusionSource {
            match_id: 1,
            period: "2H".into(),
            index: i,
        }
    }

    fn cs(text: &str, i: usize) -> ConclusionString {
        ConclusionString {
            text: text.into(),
            source: src(i),
        }
    }

    #[test]
    fn stringify_examples() {
        let s = ConclusionString::from_labels(["Bin5_25413", "Bin5_3682", "Bin5_25413"], src(0));
        assert_eq!(s.text, "Bin5_25413 Bin5_3682");
        assert_eq!(ConclusionString::from_labels(["Bin0_7"], src(0)).text, "Bin0_7");
        assert_eq!(
            ConclusionString::from_labels(["Bin9_10", "Bin2_10"], src(0)).text,
            "Bin2_10 Bin9_10"
        );
        assert_eq!(ConclusionString::from_labels([], src(0)).text, "");
    }

    #[test]
    fn stringify_from_context() {
        let ctx = FormalContext::new(
            vec!["g".into()],
            vec!["Bin9_10".into(), "Bin2_10".into()],
            &[vec![true, true]],
        )
        .unwrap();
        let s = stringify_conclusion(&AttributeSet::full(2), &ctx, src(3)).unwrap();
        assert_eq!(s.text, "Bin2_10 Bin9_10");
        assert_eq!(s.source.index, 3);
        assert!(stringify_conclusion(&AttributeSet::full(3), &ctx, src(0)).is_err());
    }

    #[test]
    fn extract_examples() {
        let cfg = SearchConfig::default();
        let hits = extract_similar(&cs("a b", 0), &[cs("a b", 0), cs("a c", 1), cs("z", 2)], &cfg).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].target.text.as_str(), hits[0].ratio), ("a b", 100));
        assert_eq!(token_sort_ratio("a b", "a c"), 67);

        assert!(extract_similar(&cs("a", 0), &[], &cfg).unwrap().is_empty());

        let one = SearchConfig { limit: 1, ..cfg };
        let hits = extract_similar(&cs("a b", 0), &[cs("b a", 0), cs("a b", 1)], &one).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].target.source.index, 0);
    }

    #[test]
    fn extract_orders_by_ratio() {
        let cfg = SearchConfig {
            score_cutoff: 0,
            limit: 10,
        };
        let hits = extract_similar(&cs("abcd", 0), &[cs("zzzz", 0), cs("abcz", 1), cs("abcd", 2)], &cfg).unwrap();
        let ratios: Vec<u8> = hits.iter().map(|h| h.ratio).collect();
        assert_eq!(ratios, [100, 75, 0]);
    }

    #[test]
    fn config_validation() {
        let bad = SearchConfig {
            score_cutoff: 101,
            limit: 1,
        };
        assert!(extract_similar(&cs("a", 0), &[], &bad).is_err());
        let bad = SearchConfig {
            score_cutoff: 75,
            limit: 0,
        };
        assert!(bad.validate().is_err());
    }

    fn half(m: u64, p: &str, texts: &[&str]) -> HalfConclusions {
        let key = HalfKey::new(m, p);
        HalfConclusions {
            conclusions: texts
                .iter()
                .enumerate()
                .map(|(i, t)| ConclusionString {
                    text: t.to_string(),
                    source: ConclusionSource::new(&key, i),
                })
                .collect(),
            half: key,
        }
    }

    #[test]
    fn search_groups_and_dedup() {
        let index = half(1, "1H", &["a b", "a b", "q"]);
        let targets = [half(1, "2H", &["a b", "x"]), half(2, "1H", &[]), half(2, "2H", &["b a c"])];
        let cfg = SearchConfig::default();
        let report = search_halves(&index, &targets, &cfg, SearchOptions::default()).unwrap();
        assert_eq!(report.targets.len(), 3);
        assert!(report.targets[1].missing);
        let rows: Vec<_> = report.rows().collect();
        assert_eq!(
            rows,
            [
                ("a b", 1, "2H", "a b", 100),
                ("a b", 2, "2H", "b a c", 75),
                ("a b", 1, "2H", "a b", 100),
                ("a b", 2, "2H", "b a c", 75),
            ]
        );
        let dedup = search_halves(
            &index,
            &targets,
            &cfg,
            SearchOptions {
                dedup_hits: true,
                exec: Execution::Sequential,
            },
        )
        .unwrap();
        assert_eq!(dedup.rows().count(), 2);

        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("query_text,target_match,target_period,target_text,ratio\n"));
        assert_eq!(csv.lines().nth(1), Some("a b,1,2H,a b,100"));
        let back: SearchReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn empty_index_gives_empty_report() {
        let report = search_halves(
            &half(1, "1H", &[]),
            &[half(1, "2H", &["a"])],
            &SearchConfig::default(),
            SearchOptions::default(),
        )
        .unwrap();
        assert!(report.groups.is_empty());
        assert_eq!(report.targets[0].hits, 0);
    }
}
