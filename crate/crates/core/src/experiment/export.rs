use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// `histogram.csv` and `trace.csv`.
    Csv,
    /// `summary.json`.
    SummaryJson,
}

/// Scalar results of one experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tvd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_mz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_mean_mz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl Summary {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Summary {
            experiment: experiment.to_string(),
            seed,
            versions: versions(),
            ..Summary::default()
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }
}

pub(crate) fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([(env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string())])
}

/// One sampler trace row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub sweep: usize,
    pub mz: f64,
    pub energy: f64,
}

/// What [`export_results`] writes. Empty parts give header-only files.
#[derive(Debug, Clone, Default)]
pub struct ExportData {
    pub histogram: Option<Histogram>,
    pub trace: Vec<TraceSample>,
    pub summary: Summary,
}

/// Creates `dir/name` and hands a buffered writer to `body`.
pub(crate) fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let run = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w)?;
        w.flush()
    };
    run().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn export_results(data: &ExportData, format: ExportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ExportFormat::Csv => {
            let hist = write_file(dir, "histogram.csv", |w| match &data.histogram {
                Some(h) => h.write_csv(w),
                None => writeln!(w, "state_index,probability"),
            })?;
            let trace = write_file(dir, "trace.csv", |w| {
                writeln!(w, "sweep,mz,energy")?;
                for t in &data.trace {
                    writeln!(w, "{},{:.12e},{:.12e}", t.sweep, t.mz, t.energy)?;
                }
                Ok(())
            })?;
            Ok(vec![hist, trace])
        }
        ExportFormat::SummaryJson => {
            let path = write_file(dir, "summary.json", |w| {
                serde_json::to_writer_pretty(&mut *w, &data.summary)?;
                writeln!(w)
            })?;
            Ok(vec![path])
        }
    }
}
