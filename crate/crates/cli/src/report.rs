//! Tabular result container with CSV and JSON serialization.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Output encoding selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A finished result table: named columns, stringified rows, and run metadata.
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub meta: BTreeMap<String, String>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.insert(key.to_string(), value.into());
    }

    /// Standard metadata block shared by every subcommand.
    pub fn stamp(&mut self, argv: &[String], seed: u64, timestamp: bool) {
        self.set_meta("schema_version", "1");
        self.set_meta("tool_version", env!("CARGO_PKG_VERSION"));
        self.set_meta("command", argv.join(" "));
        self.set_meta("seed", seed.to_string());
        if timestamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            self.set_meta("timestamp_unix_s", now.to_string());
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("#{k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let body = serde_json::json!({
            "metadata": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut text = serde_json::to_string_pretty(&body).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Write to `out` if given (atomically, via a sibling temp file), else stdout.
    pub fn emit(&self, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format);
        match out {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Write bytes to `path` through a temp file plus rename so readers never
/// observe a half-written report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
    };
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
