//! Machine-readable output: versioned CSV (RFC 4180 via the `csv` writer,
//! `# schema=1` comment header) and JSON summaries with the fully resolved
//! configuration embedded.  Files are written atomically (temp file + rename)
//! and contain nothing non-deterministic, so identical configurations yield
//! byte-identical outputs.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub fn artifact_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// JSON document with the standard envelope: schema, version, config, result.
pub fn json_document(config: &Value, result: Value) -> Value {
    serde_json::json!({
        "schema": SCHEMA_VERSION,
        "version": artifact_version(),
        "config": config,
        "result": result,
    })
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("output i/o failed: {e}"))
}

/// Render a CSV table: schema/version/config comment lines, a header row, and
/// records, all RFC 4180-quoted.
pub fn render_csv(config: &Value, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut text = format!(
        "# schema={SCHEMA_VERSION}\n# version={}\n# config={}\n",
        artifact_version(),
        serde_json::to_string(config).map_err(|e| Error::InvalidInput(e.to_string()))?
    );
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).map_err(|e| Error::InvalidInput(e.to_string()))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    text.push_str(&String::from_utf8(body).map_err(|e| Error::InvalidInput(e.to_string()))?);
    Ok(text)
}

/// Atomic write: a temp file in the destination directory renamed over the
/// target, so readers never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(content.as_bytes()).map_err(io_err)?;
    tmp.persist(path)
        .map_err(|e| io_err(e.error))
        .map(|_| ())
}

/// Floats rendered with full round-trip precision (shortest representation).
pub fn fmt_f64(x: f64) -> String {
    let mut buf = ryu_like(x);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(x: f64) -> String {
    // `{}` on f64 is the shortest round-trip representation since Rust 1.0's
    // Grisu/Ryū formatting.
    format!("{x}")
}

/// Optional float cell: empty when absent (failures are encoded per-row).
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
