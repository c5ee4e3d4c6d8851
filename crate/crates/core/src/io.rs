//! CSV and metadata emission.
//!
//! Every float is printed with 17 significant digits, enough for an exact
//! `f64` round trip, so reading a file back and re-emitting it reproduces
//! the bytes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::physics::FieldSample;

/// Decimal form of `x` with 17 significant digits.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of a training history file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    /// 1-based optimizer step.
    pub epoch: usize,
    /// Coefficient estimate after the step.
    pub beta: f64,
    /// Loss components evaluated before the step.
    pub data_loss: f64,
    pub physics_loss: f64,
    pub total_loss: f64,
}

/// One row of an error-field file: exact and predicted amplitude on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorFieldRow {
    pub x: f64,
    pub t: f64,
    pub amp_exact: f64,
    pub amp_pred: f64,
    pub abs_error: f64,
}

/// One row of a fixed-time amplitude snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub amp_exact: f64,
    pub amp_pred: f64,
}

/// One row of a sweep's per-run file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub variable: String,
    pub value: f64,
    pub seed: u64,
    pub status: String,
    pub beta_final: f64,
    pub rel_error_percent: f64,
    pub elapsed_seconds: f64,
}

/// One row of a sweep's aggregate file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub variable: String,
    pub value: f64,
    pub n_runs: usize,
    pub mean_rel_error_percent: f64,
    pub std_rel_error_percent: f64,
    pub mean_elapsed_seconds: f64,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

fn malformed(path: &Path, detail: String) -> Error {
    Error::MalformedFile {
        what: "csv",
        path: path.display().to_string(),
        detail,
    }
}

/// Lines after a verified header, split on commas.
fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => {
            return Err(malformed(
                path,
                format!("expected header {header:?}, got {other:?}"),
            ))
        }
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn field_f64(path: &Path, row: &[String], idx: usize) -> Result<f64> {
    row.get(idx)
        .ok_or_else(|| malformed(path, format!("missing column {idx}")))?
        .parse()
        .map_err(|e| malformed(path, format!("bad float in column {idx}: {e}")))
}

fn field_usize(path: &Path, row: &[String], idx: usize) -> Result<usize> {
    row.get(idx)
        .ok_or_else(|| malformed(path, format!("missing column {idx}")))?
        .parse()
        .map_err(|e| malformed(path, format!("bad integer in column {idx}: {e}")))
}

pub const DATASET_HEADER: &str = "x,t,u,v";

pub fn write_dataset_csv(path: &Path, samples: &[FieldSample]) -> Result<()> {
    let mut out = String::from(DATASET_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_g17(s.x),
            fmt_g17(s.t),
            fmt_g17(s.u),
            fmt_g17(s.v)
        );
    }
    write_text(path, &out)
}

pub fn read_dataset_csv(path: &Path) -> Result<Vec<FieldSample>> {
    read_rows(path, DATASET_HEADER)?
        .iter()
        .map(|row| {
            Ok(FieldSample {
                x: field_f64(path, row, 0)?,
                t: field_f64(path, row, 1)?,
                u: field_f64(path, row, 2)?,
                v: field_f64(path, row, 3)?,
            })
        })
        .collect()
}

/// Key=value sidecar describing how a dataset was produced.
pub fn write_dataset_meta(
    path: &Path,
    beta_true: f64,
    noise_level: f64,
    seed: u64,
    n_u: usize,
) -> Result<()> {
    let text = format!(
        "beta_true={}\nnoise_level={}\nseed={seed}\nn_u={n_u}\n",
        fmt_g17(beta_true),
        fmt_g17(noise_level)
    );
    write_text(path, &text)
}

pub const HISTORY_HEADER: &str = "epoch,beta,data_loss,physics_loss,total_loss";

pub fn write_history_csv(path: &Path, records: &[HistoryRecord]) -> Result<()> {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.epoch,
            fmt_g17(r.beta),
            fmt_g17(r.data_loss),
            fmt_g17(r.physics_loss),
            fmt_g17(r.total_loss)
        );
    }
    write_text(path, &out)
}

pub fn read_history_csv(path: &Path) -> Result<Vec<HistoryRecord>> {
    read_rows(path, HISTORY_HEADER)?
        .iter()
        .map(|row| {
            Ok(HistoryRecord {
                epoch: field_usize(path, row, 0)?,
                beta: field_f64(path, row, 1)?,
                data_loss: field_f64(path, row, 2)?,
                physics_loss: field_f64(path, row, 3)?,
                total_loss: field_f64(path, row, 4)?,
            })
        })
        .collect()
}

pub const ERROR_FIELD_HEADER: &str = "x,t,amp_exact,amp_pred,abs_error";

pub fn write_error_field_csv(path: &Path, rows: &[ErrorFieldRow]) -> Result<()> {
    let mut out = String::from(ERROR_FIELD_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_g17(r.x),
            fmt_g17(r.t),
            fmt_g17(r.amp_exact),
            fmt_g17(r.amp_pred),
            fmt_g17(r.abs_error)
        );
    }
    write_text(path, &out)
}

pub fn read_error_field_csv(path: &Path) -> Result<Vec<ErrorFieldRow>> {
    read_rows(path, ERROR_FIELD_HEADER)?
        .iter()
        .map(|row| {
            Ok(ErrorFieldRow {
                x: field_f64(path, row, 0)?,
                t: field_f64(path, row, 1)?,
                amp_exact: field_f64(path, row, 2)?,
                amp_pred: field_f64(path, row, 3)?,
                abs_error: field_f64(path, row, 4)?,
            })
        })
        .collect()
}

pub const SNAPSHOT_HEADER: &str = "x,amp_exact,amp_pred";

pub fn write_snapshot_csv(path: &Path, rows: &[SnapshotRow]) -> Result<()> {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_g17(r.x),
            fmt_g17(r.amp_exact),
            fmt_g17(r.amp_pred)
        );
    }
    write_text(path, &out)
}

pub fn read_snapshot_csv(path: &Path) -> Result<Vec<SnapshotRow>> {
    read_rows(path, SNAPSHOT_HEADER)?
        .iter()
        .map(|row| {
            Ok(SnapshotRow {
                x: field_f64(path, row, 0)?,
                amp_exact: field_f64(path, row, 1)?,
                amp_pred: field_f64(path, row, 2)?,
            })
        })
        .collect()
}

pub const RUNS_HEADER: &str = "variable,value,seed,status,beta_final,rel_error_percent,elapsed_seconds";

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.variable,
            fmt_g17(r.value),
            r.seed,
            r.status,
            fmt_g17(r.beta_final),
            fmt_g17(r.rel_error_percent),
            fmt_g17(r.elapsed_seconds)
        );
    }
    write_text(path, &out)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    read_rows(path, RUNS_HEADER)?
        .iter()
        .map(|row| {
            Ok(RunRecord {
                variable: row
                    .first()
                    .ok_or_else(|| malformed(path, "missing column 0".into()))?
                    .clone(),
                value: field_f64(path, row, 1)?,
                seed: field_usize(path, row, 2)? as u64,
                status: row
                    .get(3)
                    .ok_or_else(|| malformed(path, "missing column 3".into()))?
                    .clone(),
                beta_final: field_f64(path, row, 4)?,
                rel_error_percent: field_f64(path, row, 5)?,
                elapsed_seconds: field_f64(path, row, 6)?,
            })
        })
        .collect()
}

pub const SUMMARY_HEADER: &str =
    "variable,value,n_runs,mean_rel_error_percent,std_rel_error_percent,mean_elapsed_seconds";

pub fn write_summary_csv(path: &Path, records: &[SummaryRecord]) -> Result<()> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.variable,
            fmt_g17(r.value),
            r.n_runs,
            fmt_g17(r.mean_rel_error_percent),
            fmt_g17(r.std_rel_error_percent),
            fmt_g17(r.mean_elapsed_seconds)
        );
    }
    write_text(path, &out)
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRecord>> {
    read_rows(path, SUMMARY_HEADER)?
        .iter()
        .map(|row| {
            Ok(SummaryRecord {
                variable: row
                    .first()
                    .ok_or_else(|| malformed(path, "missing column 0".into()))?
                    .clone(),
                value: field_f64(path, row, 1)?,
                n_runs: field_usize(path, row, 2)?,
                mean_rel_error_percent: field_f64(path, row, 3)?,
                std_rel_error_percent: field_f64(path, row, 4)?,
                mean_elapsed_seconds: field_f64(path, row, 5)?,
            })
        })
        .collect()
}
