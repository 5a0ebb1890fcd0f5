//! Configuration and stages of the end-to-end analysis.

mod config;
mod stages;

pub use config::{DatasetFiles, PipelineConfig, DATA_DIR_ENV, EVENTS_FILE, MATCHES_FILE, PLAYERS_FILE};
pub use stages::*;

use crate::error::Error;

/// Process exit code for an error: 1 for usage and configuration problems,
/// 2 for malformed input data, 3 for I/O failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) => 1,
        Error::Json { .. } | Error::Record { .. } | Error::Format { .. } | Error::BinOverflow { .. } => 2,
        Error::Io { .. } => 3,
    }
}
