//! Batch pipeline and HTTP service for the news event graph.

pub mod cli;
pub mod config;
pub mod http;
pub mod stages;

pub use config::{ConfigError, PipelineConfig};
pub use stages::{MissingSnapshot, Pipeline, Stage, StageReport};

/// Process exit code for an error: 1 for usage and configuration problems, 2 for data problems.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<MissingSnapshot>() || cause.is::<clap::Error>() {
            return 1;
        }
        if let Some(newsgraph_core::Error::Config(_)) = cause.downcast_ref::<newsgraph_core::Error>() {
            return 1;
        }
    }
    2
}
