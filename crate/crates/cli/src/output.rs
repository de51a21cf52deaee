//! Document encoding. JSON documents are `{meta, data}` objects; CSV tables
//! carry a header row. Floats are rounded to 12 significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Rounds to 12 significant digits. Idempotent, so re-emitting a parsed
/// document reproduces it exactly.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn round_all(values: &[f64]) -> Vec<f64> {
    values.iter().copied().map(round12).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Document<M: Serialize, D: Serialize> {
    pub meta: M,
    pub data: D,
}

pub fn to_json<M: Serialize, D: Serialize>(meta: &M, data: &D) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(&Document { meta, data })?;
    text.push('\n');
    Ok(text)
}

/// Parses an emitted JSON document and writes it back out.
pub fn reemit_json(text: &str) -> Result<String, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let object = value
        .as_object()
        .ok_or_else(|| CliError::Config("document is not a JSON object".into()))?;
    if !(object.len() == 2 && object.contains_key("meta") && object.contains_key("data")) {
        return Err(CliError::Config("document must have exactly the keys meta and data".into()));
    }
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

/// CSV text from a header and rows of already formatted cells.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn cell(x: f64) -> String {
    round12(x).to_string()
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}
