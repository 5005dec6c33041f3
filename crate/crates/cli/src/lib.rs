//! Batch front end: configuration, the five commands and artifact writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::run;
pub use config::{Command, RunConfig};
pub use error::CliError;

/// Worker count: the request (default: available processors), capped by
/// `QUATLIE_THREADS` when set.
pub fn worker_count(requested: Option<usize>) -> usize {
    let default = std::thread::available_parallelism().map_or(1, |n| n.get());
    let n = requested.unwrap_or(default).max(1);
    match std::env::var("QUATLIE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(cap) if cap > 0 => n.min(cap),
        _ => n,
    }
}
