//! CSV and JSON persistence. Every file embeds the exact config it was
//! produced from (as canonical JSON plus a short hash), values are written
//! with Rust's shortest-round-trip float formatting, rows end with `\n`,
//! and writes go through a temp file + rename.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::LabError;

/// FNV-1a over the canonical config text; enough to spot config drift.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Provenance block shared by the CSV header and the JSON envelope.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub subcommand: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(subcommand: &str, config: &impl Serialize, seed: u64) -> Result<Self, LabError> {
        // serde_json maps sort keys, so this rendering is canonical
        let config = serde_json::to_value(config)
            .map_err(|e| LabError::Runtime(format!("config serialization: {e}")))?;
        let canonical = config.to_string();
        Ok(Provenance {
            subcommand: subcommand.to_string(),
            seed,
            config,
            config_hash: fnv1a_hex(canonical.as_bytes()),
        })
    }
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let parent = path.parent().ok_or_else(|| {
        LabError::Config(format!("output path {} has no parent directory", path.display()))
    })?;
    fs::create_dir_all(parent)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn cell_f64(v: f64) -> String {
    format!("{v}")
}

pub fn cell_u64(v: u64) -> String {
    format!("{v}")
}

pub fn cell_usize(v: usize) -> String {
    format!("{v}")
}

/// Write a CSV with `#`-prefixed provenance comments, a header row and data
/// rows. Fails if any row width disagrees with the header.
pub fn write_csv(
    path: &Path,
    provenance: &Provenance,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<(), LabError> {
    let mut out = String::new();
    out.push_str(&format!("# {} v{}\n", crate::ARTIFACT_NAME, crate::VERSION));
    out.push_str(&format!("# subcommand: {}\n", provenance.subcommand));
    out.push_str(&format!("# seed: {}\n", provenance.seed));
    out.push_str(&format!("# config: {}\n", provenance.config));
    out.push_str(&format!("# config_hash: {}\n", provenance.config_hash));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        if row.len() != columns.len() {
            return Err(LabError::Runtime(format!(
                "row width {} does not match {} columns",
                row.len(),
                columns.len()
            )));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Write the JSON summary envelope.
pub fn write_summary(
    path: &Path,
    provenance: &Provenance,
    results: &impl Serialize,
) -> Result<(), LabError> {
    let doc = serde_json::json!({
        "artifact": crate::ARTIFACT_NAME,
        "version": crate::VERSION,
        "subcommand": provenance.subcommand,
        "seed": provenance.seed,
        "config": provenance.config,
        "config_hash": provenance.config_hash,
        "results": serde_json::to_value(results)
            .map_err(|e| LabError::Runtime(format!("summary serialization: {e}")))?,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| LabError::Runtime(format!("summary serialization: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Parsed CSV: header columns and raw string cells, provenance lines skipped.
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable, LabError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| LabError::Runtime(format!("{}: missing CSV header", path.display())))?;
    let columns: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for line in lines {
        let cells: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        if cells.len() != columns.len() {
            return Err(LabError::Runtime(format!(
                "{}: row width {} does not match header",
                path.display(),
                cells.len()
            )));
        }
        rows.push(cells);
    }
    Ok(CsvTable { columns, rows })
}
