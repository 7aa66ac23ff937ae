//! CSV files and run manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{LegStatus, SweepErrors, SweepRecord, TimeSeriesRecord};
use crate::fpcore::{format_sci, parse_decimal, PrecisionConfig, SoftFloat};
use crate::Wide;

use super::config::Settings;
use super::CliError;

pub const SWEEP_CSV: &str = "sweep.csv";
pub const TIMESERIES_CSV: &str = "timeseries.csv";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const MANIFEST: &str = "manifest.json";

pub const SWEEP_HEADER: [&str; 7] = ["dt", "n_steps", "E", "E_t", "E_r", "status", "wall_time_s"];
pub const TIMESERIES_HEADER: [&str; 3] = ["t", "E_r", "E_t"];
pub const DIAGNOSTICS_HEADER: [&str; 3] = ["kind", "key", "value"];

/// Columns that legitimately differ between identical runs.
pub const VOLATILE_COLUMNS: [&str; 1] = ["wall_time_s"];

pub const SCHEMA_VERSION: u32 = 1;

/// Enough significant digits to pin down a 113-bit value.
const WIDE_DIGITS: usize = 36;

pub fn fmt_wide(x: &Wide) -> String {
    format_sci(&x.to_rational(), WIDE_DIGITS)
}

/// Shortest decimal that reads back as the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub fn parse_wide(s: &str) -> Result<Wide, CliError> {
    parse_decimal(s)
        .map(|r| SoftFloat::from_rational(&r, PrecisionConfig::QUAD))
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub type Table = Vec<Vec<String>>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Header and rows of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Table), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = r.headers().map_err(|e| io_err(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Usage(format!("{} has no column {name:?}", path.display())))
}

fn parse_f64(s: &str, path: &Path) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("{}: bad number {s:?}", path.display())))
}

pub fn sweep_rows(records: &[SweepRecord]) -> Table {
    records
        .iter()
        .map(|r| {
            let (e, e_t, e_r) = match &r.errors {
                Some(err) => (fmt_wide(&err.e), fmt_wide(&err.e_t), fmt_wide(&err.e_r)),
                None => (String::new(), String::new(), String::new()),
            };
            vec![
                fmt_f64(r.dt),
                r.n_steps.to_string(),
                e,
                e_t,
                e_r,
                r.status.as_str().to_string(),
                format!("{:.6}", r.wall_time_s),
            ]
        })
        .collect()
}

pub fn timeseries_rows(records: &[TimeSeriesRecord]) -> Table {
    records.iter().map(|r| vec![fmt_f64(r.t), fmt_wide(&r.e_r), fmt_wide(&r.e_t)]).collect()
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRecord>, CliError> {
    let (header, rows) = read_csv(path)?;
    let idx: Vec<usize> = SWEEP_HEADER.iter().map(|c| column(&header, c, path)).collect::<Result<_, _>>()?;
    rows.iter()
        .map(|row| {
            let status = LegStatus::parse(&row[idx[5]])
                .ok_or_else(|| CliError::Usage(format!("{}: bad status {:?}", path.display(), row[idx[5]])))?;
            let errors = if status == LegStatus::Ok {
                Some(SweepErrors { e: parse_wide(&row[idx[2]])?, e_t: parse_wide(&row[idx[3]])?, e_r: parse_wide(&row[idx[4]])? })
            } else {
                None
            };
            Ok(SweepRecord {
                dt: parse_f64(&row[idx[0]], path)?,
                n_steps: row[idx[1]].parse().map_err(|_| CliError::Usage(format!("{}: bad n_steps", path.display())))?,
                status,
                errors,
                wall_time_s: parse_f64(&row[idx[6]], path)?,
            })
        })
        .collect()
}

/// `(t, value)` pairs of one column of a time-series file.
pub fn read_series(path: &Path, name: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let (header, rows) = read_csv(path)?;
    let t = column(&header, "t", path)?;
    let v = column(&header, name, path)?;
    rows.iter()
        .map(|row| Ok((parse_f64(&row[t], path)?, parse_wide(&row[v])?.to_f64())))
        .collect()
}

/// A CSV with the volatile columns removed.
pub fn data_columns(path: &Path) -> Result<(Vec<String>, Table), CliError> {
    let (header, rows) = read_csv(path)?;
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !VOLATILE_COLUMNS.contains(&header[i].as_str())).collect();
    let pick = |row: &Vec<String>| keep.iter().map(|&i| row[i].clone()).collect::<Vec<_>>();
    Ok((pick(&header), rows.iter().map(pick).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub schema_version: u32,
    /// `sweep`, `longrun` or `diagnose`.
    pub command: String,
    pub argv: Vec<String>,
    pub config: Settings,
    pub outputs: Vec<String>,
    pub operation_order: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], config: Settings, outputs: &[&str]) -> Self {
        RunManifest {
            artifact: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            argv: argv.to_vec(),
            config,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            operation_order: crate::schemes::OPERATION_ORDER_TAG.to_string(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: not a manifest: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_text_round_trips() {
        let third = SoftFloat::from_rational(&crate::BigRational::new(1.into(), 3.into()), PrecisionConfig::QUAD);
        let text = fmt_wide(&third);
        assert_eq!(parse_wide(&text).unwrap(), third);
        assert_eq!(fmt_f64(0.1), "1e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn sweep_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(SWEEP_CSV);
        let w = |x: f64| SoftFloat::from_f64(x, PrecisionConfig::QUAD);
        let recs = vec![
            SweepRecord {
                dt: 0.1,
                n_steps: 10,
                status: LegStatus::Ok,
                errors: Some(SweepErrors { e: w(1e-3), e_t: w(2e-3), e_r: w(3e-3) }),
                wall_time_s: 0.5,
            },
            SweepRecord { dt: 1e-9, n_steps: 1 << 40, status: LegStatus::SkippedGuard, errors: None, wall_time_s: 0.0 },
        ];
        write_csv(&path, &SWEEP_HEADER, &sweep_rows(&recs)).unwrap();
        let back = read_sweep(&path).unwrap();
        assert_eq!(back, recs);
        let (header, rows) = data_columns(&path).unwrap();
        assert_eq!(header.len(), 6);
        assert_eq!(rows[1][5], "skipped_guard");
    }
}
