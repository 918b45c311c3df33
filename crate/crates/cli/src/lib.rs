//! Batch front-end for the `qleak` toolkit: JSON input documents, command
//! implementations that render CSV or plain-text reports, and exit-code mapping.

pub mod commands;
pub mod error;
pub mod format;
pub mod spec;

pub use error::{CliError, CliResult};

/// Worker pool for per-row parallelism, capped by `QLEAK_THREADS` when set.
pub fn worker_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("QLEAK_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::validation(
                "QLEAK_THREADS",
                format!("expected a positive integer, got {raw:?}"),
            )
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::validation("QLEAK_THREADS", e.to_string()))
}
