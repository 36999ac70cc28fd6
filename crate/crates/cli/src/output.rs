//! CSV emission with sidecar metadata.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rdpce::analysis::ErrorSeries;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Rectangular numeric table with a header row. Missing values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    /// First column from `x_name` and the shared abscissa, one column per series.
    pub fn from_series(x_name: &str, series: &[ErrorSeries]) -> io::Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "series set is empty"))?;
        if series.iter().any(|s| s.times != first.times) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "series do not share their abscissae",
            ));
        }
        let mut header = vec![x_name.to_string()];
        header.extend(series.iter().map(|s| s.label.clone()));
        let rows = first
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut row = vec![Some(t)];
                row.extend(series.iter().map(|s| s.errors[i]));
                row
            })
            .collect();
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => "nan".into(),
    }
}

pub fn parse_csv(path: &Path) -> io::Result<Table> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "missing header"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| {
                    let v: f64 = cell
                        .parse()
                        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{cell}: {e}")))?;
                    Ok(if v.is_nan() { None } else { Some(v) })
                })
                .collect()
        })
        .collect::<io::Result<_>>()?;
    Ok(Table { header, rows })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `file` under `dir` and `file.meta.json` next to it, both through a
/// temporary file and rename. Returns the CSV path.
pub fn emit_csv(dir: &Path, file: &str, table: &Table, meta: Value) -> io::Result<PathBuf> {
    if table.rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "table has no rows"));
    }
    fs::create_dir_all(dir)?;
    let path = dir.join(file);
    let body = table.render();
    let sidecar = json!({
        "file": file,
        "sha256": content_hash(body.as_bytes()),
        "columns": table.header,
        "metadata": meta,
    });
    let mut sidecar_text = serde_json::to_string_pretty(&sidecar).map_err(io::Error::other)?;
    sidecar_text.push('\n');
    write_atomic(&path, body.as_bytes())?;
    write_atomic(&dir.join(format!("{file}.meta.json")), sidecar_text.as_bytes())?;
    Ok(path)
}
