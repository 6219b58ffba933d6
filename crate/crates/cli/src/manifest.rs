//! Run manifests: every output file gets a `<out>.manifest.json` sibling
//! recording the full parameter set needed to reproduce it.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::AppResult;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Flag name -> value; keys are the long CLI flags with `_` for `-`.
    pub parameters: Map<String, Value>,
    pub master_seed: u64,
    /// How per-sample randomness derives from the master seed.
    pub seed_derivation: String,
    pub worker_count: usize,
    pub tool_version: String,
    pub duration_seconds: f64,
}

/// The one derivation rule the toolkit uses; recorded verbatim in every
/// manifest so a run can be reproduced without consulting the source.
pub const SEED_DERIVATION: &str =
    "ChaCha12 substream per sample: key = master_seed, stream id = sample_index";

pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn write_manifest(
    out: &Path,
    command: &str,
    parameters: Map<String, Value>,
    master_seed: u64,
    worker_count: usize,
    started: Instant,
) -> AppResult<()> {
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        master_seed,
        seed_derivation: SEED_DERIVATION.to_string(),
        worker_count,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    std::fs::write(manifest_path(out), body)?;
    Ok(())
}
