//! The experiments behind the `clockforge` binary.
//!
//! Each subcommand writes plot-ready CSV/JSON into `--out` and returns a
//! JSON summary for standard output. Outputs are byte-identical for
//! identical inputs; wall-clock time is only reported on request.

mod args;
mod commands;
mod plot;

use std::path::Path;

pub use args::{
    Cli, Command, ConfigFile, EvolveArgs, EvolveMode, GapScanArgs, GroundStateArgs, ScalingArgs, VerifyArgs,
};
pub use commands::{run, Outcome};

use crate::{Error, Result};

/// Environment variable capping the worker threads used by parallel scans.
pub const THREADS_ENV: &str = "CLOCKFORGE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a failed run.
pub fn exit_code(error: &Error) -> i32 {
    if error.is_config_error() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

/// Machine-readable error report for standard error.
pub fn error_json(error: &Error) -> String {
    serde_json::json!({ "error": error.kind(), "message": error.to_string() }).to_string()
}

/// Size the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got `{value}`"))
        })?;
    // a second initialisation (e.g. in tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parse a `--config` file.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))
}
