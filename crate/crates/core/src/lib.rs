pub mod error;
pub mod exec;
pub mod fca;
pub mod ingest;
pub mod patterns;
pub mod pipeline;
pub mod scaling;

pub use error::{Error, Result};
