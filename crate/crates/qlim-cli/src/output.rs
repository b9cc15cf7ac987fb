//! Table assembly and CSV/JSON serialization. All floats print with 17
//! significant digits so downstream plotting never re-rounds; the bodies
//! are byte-stable for a fixed seed and configuration.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Str(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Full double precision: one leading digit plus 16 decimals.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("serializable rows") + "\n"
    }

    /// Write the table to `out` (stdout when absent) and drop a metadata
    /// sidecar next to file output. The sidecar carries the timestamp so
    /// the data body stays reproducible.
    pub fn emit(
        &self,
        out: Option<&Path>,
        format: Format,
        command: &str,
        config: Value,
        seed: u64,
    ) -> Result<()> {
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        match out {
            Some(path) => {
                fs::write(path, &body).with_context(|| format!("writing {}", path.display()))?;
                let meta = json!({
                    "command": command,
                    "config": config,
                    "seed": seed,
                    "rows": self.rows.len(),
                    "version": env!("CARGO_PKG_VERSION"),
                    "unix_time": std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                });
                let meta_path = sidecar_path(path);
                fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
                    .with_context(|| format!("writing {}", meta_path.display()))?;
            }
            None => {
                std::io::stdout().write_all(body.as_bytes())?;
            }
        }
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".meta.json");
    std::path::PathBuf::from(os)
}
