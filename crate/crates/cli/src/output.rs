use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anisowalk::analysis::VerificationReport;
use anyhow::{Context, Result};
use serde::{Serialize, Serializer};

use crate::Format;

pub fn display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

/// Shortest decimal that reads back to the same `f64`; empty for NaN.
pub fn float(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))
}

/// `report.json`, plus the flattened `report.csv` when asked for.
pub fn write_reports(dir: &Path, reports: &[VerificationReport], format: Format) -> Result<()> {
    write_json(&dir.join("report.json"), reports)?;
    if format == Format::Csv {
        let mut w = csv_writer(&dir.join("report.csv"))?;
        w.write_record(["claim", "grid", "value", "ratio", "constant", "tolerance", "verdict"])?;
        for row in reports.iter().flat_map(VerificationReport::rows) {
            w.write_record([
                row.claim,
                float(row.grid),
                float(row.value),
                float(row.ratio),
                float(row.constant),
                float(row.tolerance),
                row.verdict.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct Skipped {
    pub claim: &'static str,
    pub reason: String,
}

/// Run description written next to every set of outputs. The timestamp is
/// the only field that differs between identical runs.
#[derive(Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub config: &'a C,
    pub profile: anisowalk::ProfileConfig,
    pub outputs: Vec<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Skipped>,
    pub created_unix: u64,
}

impl<'a, C: Serialize> Manifest<'a, C> {
    pub fn new(
        command: &'static str,
        config: &'a C,
        profile: &anisowalk::Profile,
        outputs: Vec<&'static str>,
    ) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            profile: profile.to_config(),
            outputs,
            skipped: Vec::new(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), self)
    }
}
