use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{ParseMode, PassFilter, DEFAULT_PASS_TAGS, DEFAULT_TEAM_ID};
use crate::patterns::SearchConfig;
use crate::scaling::ScalingConfig;

/// Environment variable naming the dataset directory.
pub const DATA_DIR_ENV: &str = "PASSFCA_DATA";

pub const EVENTS_FILE: &str = "events_Spain.json";
pub const MATCHES_FILE: &str = "matches_Spain.json";
pub const PLAYERS_FILE: &str = "players.json";

/// Dataset files under a root directory. Each file is looked up at the root
/// and then in the subdirectory the public archive unpacks it into
/// (`events/`, `matches/`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetFiles {
    pub events: Option<PathBuf>,
    pub matches: Option<PathBuf>,
    pub players: Option<PathBuf>,
}

impl DatasetFiles {
    pub fn discover(root: &Path) -> Self {
        let find = |sub: &str, name: &str| {
            [root.join(name), root.join(sub).join(name)]
                .into_iter()
                .find(|p| p.is_file())
        };
        DatasetFiles {
            events: find("events", EVENTS_FILE),
            matches: find("matches", MATCHES_FILE),
            players: find("players", PLAYERS_FILE),
        }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(DATA_DIR_ENV).map(|root| Self::discover(Path::new(&root)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub team_id: u64,
    pub tags: BTreeSet<u32>,
    pub scaling: ScalingConfig,
    pub search: SearchConfig,
    pub min_support: usize,
    pub parse_mode: ParseMode,
    pub dedup_hits: bool,
    /// Also write each scaled context as a 0/1 CSV matrix.
    pub csv_matrix: bool,
    /// Matches to ingest; empty means every match the team played.
    pub matches: Vec<u64>,
    pub events_path: Option<PathBuf>,
    pub matches_path: Option<PathBuf>,
    pub players_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            team_id: DEFAULT_TEAM_ID,
            tags: DEFAULT_PASS_TAGS.into_iter().collect(),
            scaling: ScalingConfig::default(),
            search: SearchConfig::default(),
            min_support: 1,
            parse_mode: ParseMode::SkipAndReport,
            dedup_hits: false,
            csv_matrix: false,
            matches: Vec::new(),
            events_path: None,
            matches_path: None,
            players_path: None,
            out_dir: PathBuf::from("out"),
            execution: Execution::Parallel,
        }
    }
}

impl PipelineConfig {
    pub fn pass_filter(&self) -> PassFilter {
        PassFilter {
            team_id: self.team_id,
            tags: self.tags.clone(),
        }
    }

    /// Checks value ranges and that every configured input file exists.
    pub fn validate(&self) -> Result<()> {
        self.scaling.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.search.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.min_support == 0 {
            return Err(Error::Config("min_support must be at least 1".into()));
        }
        if self.tags.is_empty() {
            return Err(Error::Config("tag set is empty".into()));
        }
        for (what, path) in [
            ("events", &self.events_path),
            ("matches", &self.matches_path),
            ("players", &self.players_path),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(Error::Config(format!("{what} file {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Fills unset dataset paths from a dataset root.
    pub fn with_dataset(mut self, files: DatasetFiles) -> Self {
        self.events_path = self.events_path.or(files.events);
        self.matches_path = self.matches_path.or(files.matches);
        self.players_path = self.players_path.or(files.players);
        self
    }
}
