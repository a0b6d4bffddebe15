//! Report emission: sorted-key JSON or CSV, to stdout or a file.

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use hurwitz_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Output {
    /// `json` is written in JSON mode; `table` in CSV mode, preceded by a
    /// `# {...}` line when `preamble` is given.
    pub fn emit(&self, json: &Value, table: Option<&Table>, preamble: Option<&Value>) -> Result<()> {
        let bytes = match (self.format, table) {
            (Format::Csv, Some(t)) => {
                let mut out = Vec::new();
                if let Some(p) = preamble {
                    writeln!(out, "# {}", serde_json::to_string(p).expect("serializable")).expect("in memory");
                }
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&t.header).map_err(csv_error)?;
                for r in &t.rows {
                    w.write_record(r).map_err(csv_error)?;
                }
                w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
                drop(w);
                out
            }
            (Format::Csv, None) => {
                return Err(Error::InvalidInput("this command has no CSV form; use --format json".into()))
            }
            (Format::Json, _) => {
                let mut s = serde_json::to_string_pretty(json).expect("serializable");
                s.push('\n');
                s.into_bytes()
            }
        };
        match &self.path {
            Some(p) => std::fs::write(p, &bytes)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(&bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}")))
            }
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// Serializes through `Value`, whose maps keep keys sorted.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn big(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

/// Fixed-precision scientific notation for floating-point report columns.
pub fn float(x: f64) -> String {
    format!("{x:.9e}")
}

pub fn join(items: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    items.into_iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().join(" ")
}
