//! Series file ingestion and serialization.
//!
//! Input formats: one-column plain text (one real per line, blank lines
//! and `#` comments skipped; this covers the one-integer-per-line EEG
//! format) and CSV with a column selector (header name or zero-based
//! index). Output uses Rust's shortest round-trip float formatting, so
//! simulate -> analyze pipelines are bit-stable.

use std::fs;
use std::path::Path;

use crate::error::{Result, SciError};

/// Read a one-column text file: one value per line, `#` starts a comment,
/// blank lines skipped. Parse failures name the 1-based line.
pub fn read_series_text(path: &Path) -> Result<Vec<f64>> {
    let content = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| SciError::Parse {
            line: idx + 1,
            message: format!("cannot parse '{line}' as a real number"),
        })?;
        if !v.is_finite() {
            return Err(SciError::Parse {
                line: idx + 1,
                message: format!("non-finite value {v}"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(SciError::InsufficientData(format!(
            "no values in {}",
            path.display()
        )));
    }
    Ok(values)
}

/// Read one column of a CSV file. `column` is either a header name or a
/// zero-based index.
pub fn read_series_csv(path: &Path, column: &str) -> Result<Vec<f64>> {
    let by_index: Option<usize> = column.parse().ok();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(by_index.is_none())
        .flexible(true)
        .from_path(path)
        .map_err(|e| SciError::InvalidInput(format!("cannot open {}: {e}", path.display())))?;

    let col_idx = match by_index {
        Some(i) => i,
        None => {
            let headers = reader
                .headers()
                .map_err(|e| SciError::InvalidInput(format!("bad CSV header: {e}")))?;
            headers
                .iter()
                .position(|h| h.trim() == column)
                .ok_or_else(|| {
                    SciError::InvalidInput(format!("no column named '{column}' in CSV header"))
                })?
        }
    };

    let mut values = Vec::new();
    let header_offset = if by_index.is_none() { 1 } else { 0 };
    for (rec_idx, record) in reader.records().enumerate() {
        let line = rec_idx + 1 + header_offset;
        let record = record.map_err(|e| SciError::Parse {
            line,
            message: format!("malformed CSV record: {e}"),
        })?;
        let field = record.get(col_idx).ok_or_else(|| SciError::Parse {
            line,
            message: format!("record has no column {col_idx}"),
        })?;
        // tolerate a header row in headerless index mode
        if by_index.is_some() && rec_idx == 0 && field.trim().parse::<f64>().is_err() {
            continue;
        }
        let v: f64 = field.trim().parse().map_err(|_| SciError::Parse {
            line,
            message: format!("cannot parse '{field}' as a real number"),
        })?;
        if !v.is_finite() {
            return Err(SciError::Parse {
                line,
                message: format!("non-finite value {v}"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(SciError::InsufficientData(format!(
            "no values in {}",
            path.display()
        )));
    }
    Ok(values)
}

/// Read a series, choosing the format by whether a column selector was
/// given.
pub fn read_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    match column {
        Some(col) => read_series_csv(path, col),
        None => read_series_text(path),
    }
}

/// Write a series as one-column text with lossless float formatting.
pub fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}
