pub mod baseline;
pub mod dbindex;
pub mod featurize;
pub mod fit;
pub mod ingest;
pub mod plot;
pub mod score;

use crate::config::Config;
use crate::error::CliResult;

/// Comma-separated list from a flag or config key.
fn list(flag: &[String], cfg: &Config, key: &str) -> Vec<String> {
    if !flag.is_empty() {
        return flag.to_vec();
    }
    cfg.raw(key)
        .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
        .unwrap_or_default()
}

/// Usage error unless `cond` holds.
fn require(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(crate::CliError::usage(msg()))
    }
}

/// Core validation failures raised before any data is read are usage errors.
fn as_usage(e: sensormap::Error) -> crate::CliError {
    crate::CliError::usage(e.to_string())
}
