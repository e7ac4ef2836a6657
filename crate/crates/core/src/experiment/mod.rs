//! Config-driven experiment runner: TOML in, CSV and JSON artifacts out.
//!
//! A config names one experiment kind (`exact`, `psl`, `compare`, `anneal`,
//! `factor`, `device`) plus the sections it needs. Every run writes a
//! `manifest.json` next to its outputs; the manifest echoes the config, so
//! rerunning it reproduces the CSV files byte for byte.

mod config;
mod export;
mod run;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use config::{
    AnnealSection, DeviceMode, DeviceSection, ExperimentConfig, ExperimentKind, FactorSection,
    MappingSection, SamplerSection, Scale,
};
pub use export::{export_results, ExportData, ExportFormat, Summary, TraceSample};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultManifest {
    pub config: ExperimentConfig,
    /// SHA-256 of the canonical TOML form of `config`.
    pub input_hash: String,
    pub seed: u64,
    pub files: Vec<OutputFile>,
    pub wall_seconds: f64,
    pub versions: BTreeMap<String, String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex(&Sha256::digest(data))
}

impl ResultManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            what: "manifest".into(),
            reason: e.to_string(),
        })
    }

    /// Runs the recorded config again.
    pub fn rerun(&self) -> Result<ResultManifest> {
        run_experiment(&self.config)
    }
}

/// Validates `config`, runs it, and writes outputs plus `manifest.json`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultManifest> {
    config.validate()?;
    let start = Instant::now();
    let paths = run::execute(config)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let dir = &config.output_dir;
    let files = paths
        .iter()
        .map(|p| {
            let data = std::fs::read(p).map_err(|e| Error::io(p, e))?;
            Ok(OutputFile {
                path: run::relative(dir, p),
                bytes: data.len() as u64,
                sha256: sha256_hex(&data),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = ResultManifest {
        config: config.clone(),
        input_hash: sha256_hex(config.to_toml_string().as_bytes()),
        seed: config.seed,
        files,
        wall_seconds,
        versions: export::versions(),
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
