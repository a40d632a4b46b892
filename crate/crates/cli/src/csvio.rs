//! CSV and sidecar serialization for run telemetry.
//!
//! All files are written atomically (temp file in the target directory, then
//! rename) so a crashed run never leaves a truncated CSV behind. Numbers use
//! Rust's shortest round-trip float formatting with a `.` decimal point, so
//! `read_records(write_records(r)) == r` holds bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hclip_core::engine::StepRecord;
use hclip_core::{Error, Result};

/// Column header of every run CSV; optional diagnostic columns may follow.
pub const RECORD_HEADER: &str = "t,fbar_gap,run_avg_gap,consensus_max,z_t,delta_t,theta_acc";

/// Writes `bytes` to `path` via a temp sibling and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Renders records as CSV text; `diag` appends one extra named column.
pub fn records_to_csv(records: &[StepRecord], diag: Option<(&str, &[f64])>) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RECORD_HEADER);
    if let Some((name, values)) = diag {
        debug_assert_eq!(values.len(), records.len(), "diag column must align with records");
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (idx, r) in records.iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.t, r.fbar_gap, r.run_avg_gap, r.consensus_max, r.z_t, r.delta_t, r.theta_acc
        );
        if let Some((_, values)) = diag {
            let _ = write!(out, ",{}", values[idx]);
        }
        out.push('\n');
    }
    out
}

pub fn write_records(
    path: &Path,
    records: &[StepRecord],
    diag: Option<(&str, &[f64])>,
) -> Result<()> {
    write_atomic(path, records_to_csv(records, diag).as_bytes())
}

/// Reads a run CSV back. The first seven columns must match
/// [`RECORD_HEADER`]; any extra diagnostic columns are ignored.
pub fn read_records(path: &Path) -> Result<Vec<StepRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("{} is empty", path.display()),
    })?;
    let expected: Vec<&str> = RECORD_HEADER.split(',').collect();
    let got: Vec<&str> = header.split(',').collect();
    if got.len() < expected.len() || got[..expected.len()] != expected[..] {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header `{header}` (want `{RECORD_HEADER}`)"),
        });
    }
    let mut records = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() < expected.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected at least {} columns, got {}", expected.len(), cells.len()),
            });
        }
        let t: usize = cells[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad step index `{}`", cells[0]),
        })?;
        let mut vals = [0.0f64; 6];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = cells[k + 1].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number `{}` in column {}", cells[k + 1], expected[k + 1]),
            })?;
        }
        records.push(StepRecord {
            t,
            fbar_gap: vals[0],
            run_avg_gap: vals[1],
            consensus_max: vals[2],
            z_t: vals[3],
            delta_t: vals[4],
            theta_acc: vals[5],
        });
    }
    Ok(records)
}

/// Writes a `key=value` sidecar, one pair per line, in the given order.
pub fn write_meta(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
    write_atomic(path, out.as_bytes())
}

/// Writes a small numeric table: a header row and `f64` cells after the
/// leading step index. Used for ensemble summaries and plot series.
pub fn write_table(path: &Path, header: &str, rows: &[(usize, Vec<f64>)]) -> Result<()> {
    let cols = header.split(',').count();
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for (t, vals) in rows {
        debug_assert_eq!(vals.len() + 1, cols, "row width must match the header");
        let _ = write!(out, "{t}");
        for v in vals {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

// ---------------------------------------------------------------------------
