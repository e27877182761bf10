//! CSV and JSON exports.
//!
//! Floats are written with 17 significant digits so they parse back exactly.
//! `records.csv` is in long form with columns `run,kind,point,amplitude,key,value`;
//! run-level scalars use an empty `point` and `amplitude`.

use crate::error::HarnessError;
use crate::io::atomic_write;
use crate::record::RunRecord;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const RECORD_COLUMNS: [&str; 6] = ["run", "kind", "point", "amplitude", "key", "value"];
pub const DECAY_COLUMNS: [&str; 3] = ["A", "tau_delta", "reached"];

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of `f64` columns as CSV text.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_float(x)))?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), HarnessError> {
    Ok(atomic_write(path, &csv_table(header, rows)?)?)
}

/// One row of an aggregated decay curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub amplitude: f64,
    /// `τ_δ`, the exhausted horizon when not reached, NaN on failure.
    pub tau_delta: f64,
    pub reached: bool,
}

pub fn decay_csv(rows: &[DecayRow]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DECAY_COLUMNS)?;
    for r in rows {
        w.write_record([
            fmt_float(r.amplitude),
            fmt_float(r.tau_delta),
            (r.reached as u8).to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_decay_csv(path: &Path) -> Result<Vec<DecayRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            let num = |i: usize| -> Result<f64, HarnessError> {
                rec.get(i)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
            };
            Ok(DecayRow {
                amplitude: num(0)?,
                tau_delta: num(1)?,
                reached: rec.get(2) == Some("1"),
            })
        })
        .collect()
}

/// Write `records.csv` and `records.json` into `dir`.
pub fn export_report(records: &[RunRecord], dir: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_COLUMNS)?;
    for (run, rec) in records.iter().enumerate() {
        for (key, &value) in &rec.summary {
            w.write_record([run.to_string(), rec.kind.clone(), String::new(), String::new(), key.clone(), fmt_float(value)])?;
        }
        for p in &rec.points {
            for (key, &value) in &p.summary {
                w.write_record([
                    run.to_string(),
                    rec.kind.clone(),
                    p.index.to_string(),
                    fmt_float(p.amplitude),
                    key.clone(),
                    fmt_float(value),
                ])?;
            }
        }
    }
    let csv_bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    atomic_write(&dir.join("records.csv"), &csv_bytes)?;
    atomic_write(&dir.join("records.json"), serde_json::to_string_pretty(records)?.as_bytes())?;
    Ok(())
}

pub fn load_report(dir: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let text = std::fs::read_to_string(dir.join("records.json"))?;
    Ok(serde_json::from_str(&text)?)
}
