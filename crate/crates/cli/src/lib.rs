//! Library side of the `dimerlab` command-line tool.
//!
//! `dimerlab <critical|bifurcation|portrait|simulate|reduce> --config <path>
//! [--out-dir <path>] [--svg]` reads one flat JSON object, runs the matching
//! analysis from `dimerlab-core` and writes CSV/JSON tables (plus optional
//! SVG plots). Data files are byte-for-byte reproducible.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod svg;

use std::path::{Path, PathBuf};

pub use config::{Command, RunConfig};
pub use error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DIMERLAB_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV}: expected a positive integer, got {raw:?}"
        ))
    })?;
    // a pool that is already initialised keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Loads the configuration for `command` and runs it.
pub fn run(
    command: Command,
    config: &Path,
    out_dir: &Path,
    svg: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let cfg = config::load(command, config)?;
    commands::execute(&cfg, out_dir, svg)
}
