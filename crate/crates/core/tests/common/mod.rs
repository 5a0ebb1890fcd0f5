//! Test-only oracles. None of this calls into the closure or basis code under
//! test beyond building contexts.
#![allow(dead_code)]

use passfca::fca::{AttributeSet, FormalContext};
use rand::Rng;

/// Plain-vector context: `rows[g][m]`.
#[derive(Clone, Debug)]
pub struct Table {
    pub rows: Vec<Vec<bool>>,
    pub num_attributes: usize,
}

impl Table {
    pub fn random<R: Rng>(rng: &mut R, max_objects: usize, max_attributes: usize) -> Table {
        let g = rng.gen_range(0..=max_objects);
        let m = rng.gen_range(0..=max_attributes);
        let density: f64 = rng.gen_range(0.1..0.9);
        let rows = (0..g)
            .map(|_| (0..m).map(|_| rng.gen_bool(density)).collect())
            .collect();
        Table {
            rows,
            num_attributes: m,
        }
    }

    pub fn context(&self) -> FormalContext {
        FormalContext::new(
            (0..self.rows.len()).map(|g| format!("g{g}")).collect(),
            (0..self.num_attributes).map(|m| format!("m{m}")).collect(),
            &self.rows,
        )
        .unwrap()
    }

    /// Attribute subsets as bit masks.
    pub fn row_mask(&self, g: usize) -> u32 {
        self.rows[g]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .fold(0, |acc, (m, _)| acc | 1 << m)
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.num_attributes) - 1
    }

    pub fn extent_size(&self, attrs: u32) -> usize {
        (0..self.rows.len())
            .filter(|&g| attrs & !self.row_mask(g) == 0)
            .count()
    }

    pub fn closure(&self, attrs: u32) -> u32 {
        (0..self.rows.len())
            .filter(|&g| attrs & !self.row_mask(g) == 0)
            .fold(self.full_mask(), |acc, g| acc & self.row_mask(g))
    }

    /// Pseudo-intents straight from the definition: `P` is not closed and
    /// contains the closure of every pseudo-intent strictly inside it.
    /// Subsets are visited by cardinality so smaller pseudo-intents are
    /// known first.
    pub fn pseudo_intents(&self) -> Vec<u32> {
        let mut subsets: Vec<u32> = (0..=self.full_mask()).collect();
        subsets.sort_by_key(|s| s.count_ones());
        let mut found: Vec<u32> = Vec::new();
        for p in subsets {
            if self.closure(p) == p {
                continue;
            }
            let respects = found
                .iter()
                .filter(|&&q| q & !p == 0 && q != p)
                .all(|&q| self.closure(q) & !p == 0);
            if respects {
                found.push(p);
            }
        }
        found
    }
}

pub fn mask_of(set: &AttributeSet) -> u32 {
    set.iter().fold(0, |acc, m| acc | 1 << m)
}

pub fn set_of(universe: usize, mask: u32) -> AttributeSet {
    AttributeSet::from_indices(universe, (0..universe).filter(|m| mask >> m & 1 == 1)).unwrap()
}

/// Levenshtein-style distance with insertion/deletion cost 1 and
/// substitution cost 2, full DP table over chars.
pub fn indel_sub2_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = if a[i - 1] == b[j - 1] { 0 } else { 2 };
            table[i][j] = (table[i - 1][j] + 1)
                .min(table[i][j - 1] + 1)
                .min(table[i - 1][j - 1] + sub);
        }
    }
    table[a.len()][b.len()]
}

/// Reference ratio: round-half-up of `100 * (L - d) / L`, 100 when both
/// strings are empty. Uses f64 with an explicit half test.
pub fn reference_ratio(a: &str, b: &str) -> u8 {
    let total = a.chars().count() + b.chars().count();
    if total == 0 {
        return 100;
    }
    let d = indel_sub2_distance(a, b);
    let exact = 100.0 * (total - d) as f64 / total as f64;
    let floor = exact.floor();
    // exact halves only occur when 2 * 100 * (L - d) is an odd multiple of L
    let twice = 200 * (total - d);
    let is_half = twice.is_multiple_of(total) && (twice / total) % 2 == 1;
    if is_half || exact - floor > 0.5 {
        floor as u8 + 1
    } else {
        floor as u8
    }
}

pub fn reference_token_sort_ratio(a: &str, b: &str) -> u8 {
    fn norm(s: &str) -> String {
        let mut t: Vec<&str> = s.split_whitespace().collect();
        t.sort_unstable();
        t.join(" ")
    }
    reference_ratio(&norm(a), &norm(b))
}

pub const TEAM: u64 = 676;
pub const OPPONENT: u64 = 682;

/// A deterministic events file in the dataset's JSON shape: both halves of
/// each match, possession alternating between the two teams in runs of
/// passes, with a few duels and shots mixed in.
pub fn synthetic_events(seed: u64, matches: &[u64], events_per_half: usize) -> String {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut id = 1_000_000u64;
    for &m in matches {
        for period in ["1H", "2H"] {
            let mut sec = 0.0f64;
            let mut team = TEAM;
            for _ in 0..events_per_half {
                sec += rng.gen_range(1.0..2800.0 / events_per_half as f64 * 2.0);
                if rng.gen_bool(0.15) {
                    team = if team == TEAM { OPPONENT } else { TEAM };
                }
                let player = team * 10 + rng.gen_range(1..=6u64);
                let (name, sub, tag) = match rng.gen_range(0..10) {
                    0 => ("Duel", "Ground attacking duel", 701),
                    1 => ("Shot", "Shot", 1801),
                    2 => ("Pass", "Cross", 1802),
                    _ => ("Pass", "Simple pass", 1801),
                };
                id += 1;
                out.push(serde_json::json!({
                    "id": id,
                    "matchId": m,
                    "teamId": team,
                    "playerId": player,
                    "eventName": name,
                    "subEventName": sub,
                    "matchPeriod": period,
                    "eventSec": (sec * 1e4).round() / 1e4,
                    "tags": [{"id": tag}],
                    "positions": [{"x": 50, "y": 50}],
                }));
            }
        }
    }
    serde_json::to_string_pretty(&serde_json::Value::Array(out)).unwrap()
}
