use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pass fell beyond the last bin while the reject policy was active.
    #[error("{}at {event_sec}s falls in bin {bin}, past the last bin {last_bin}", event_prefix(.event_id))]
    BinOverflow {
        event_id: Option<u64>,
        event_sec: f64,
        bin: u64,
        last_bin: u32,
    },

    #[error("{path}: malformed JSON at byte {offset}: {message}")]
    Json {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    /// Record-level defect raised in strict mode.
    #[error("{path}: record {record} (event {event_id}): {message}")]
    Record {
        path: PathBuf,
        record: usize,
        event_id: String,
        message: String,
    },

    #[error("{what} line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

fn event_prefix(id: &Option<u64>) -> String {
    id.map(|id| format!("event {id} ")).unwrap_or_default()
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
