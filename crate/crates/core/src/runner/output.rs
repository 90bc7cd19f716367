//! Byte-deterministic JSON and CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::OutputFormat;
use super::run::OutputRecord;
use crate::error::{Error, Result};

/// File stem `<scenario>_<first 16 hex digits of the config hash>`.
pub fn artifact_stem(record: &OutputRecord) -> String {
    format!("{}_{}", record.scenario, &record.config_hash[..16])
}

pub fn record_json(record: &OutputRecord) -> Result<String> {
    let mut text = serde_json::to_string_pretty(record).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes the record and its tables into `dir`, returning the paths written.
pub fn emit_outputs(record: &OutputRecord, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stem = artifact_stem(record);
    let mut written = Vec::new();
    if format.json() {
        let path = dir.join(format!("{stem}.json"));
        fs::write(&path, record_json(record)?)?;
        written.push(path);
    }
    if format.csv() {
        for table in &record.tables {
            let path = dir.join(format!("{stem}_{}.csv", table.name));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(e.to_string()))?;
            w.write_record(&table.header).map_err(|e| Error::Io(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}
