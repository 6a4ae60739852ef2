//! Report envelope and atomic file output.
//!
//! Every JSON report carries the tool version, the resolved configuration,
//! the seed and the wall-clock time, so two runs with the same configuration
//! differ only in `wall_clock_seconds`. Files are written to a temporary
//! sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::CliError;

/// Rounds a probability to the six decimals used in reports.
pub fn p6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub warnings: Vec<String>,
    pub result: R,
}

/// Where a command writes its files, and when it started.
pub struct Sink {
    dir: PathBuf,
    started: Instant,
}

impl Sink {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), started: Instant::now() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `file_name` atomically and echoes the report to stdout.
    pub fn report<C: Serialize, R: Serialize>(
        &self,
        file_name: &str,
        command: &'static str,
        config: &C,
        seed: u64,
        warnings: Vec<String>,
        result: R,
    ) -> Result<(), CliError> {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        let report = Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seed,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            warnings,
            result,
        };
        let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.path(file_name), text.as_bytes())?;
        print!("{text}");
        Ok(())
    }

    /// Writes a CSV table with 6-decimal cells.
    pub fn csv(&self, file_name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| CliError::Numerical(e.to_string()))?;
        for row in rows {
            w.write_record(row.iter().map(|x| format!("{x:.6}")))
                .map_err(|e| CliError::Numerical(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
        write_atomic(&self.path(file_name), &bytes)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
