//! Report documents and their JSON/CSV emission.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::ReportFormat;
use crate::{Error, Result};

pub const SURROGATE_NOTE: &str =
    "continuity of u on K is discretized as |u(x) - u(y)| <= eta whenever d(x, y) < scale";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Table cell for a real value, rounded to 15 significant digits.
pub fn cell(x: f64) -> String {
    crate::numeric::sig15_string(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub kind: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub body: Value,
    /// Named CSV tables, written as `<name>.<table>.csv`.
    pub tables: Vec<(&'static str, Table)>,
    pub notes: Vec<&'static str>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| *n == name).map(|(_, t)| t)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": super::config::SCHEMA_VERSION,
            "name": self.name,
            "kind": self.kind,
            "config_sha256": self.config_hash,
            "seed": self.seed,
            "passed": self.passed(),
            "assertions": self.assertions,
            "notes": self.notes,
            "body": self.body,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report values are finite");
        s.push('\n');
        s
    }

    /// Writes the report into `dir` and returns the files written.
    pub fn write(&self, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            ReportFormat::Json => {
                let path = dir.join(format!("{}.json", self.name));
                std::fs::write(&path, self.to_json_string())?;
                written.push(path);
            }
            ReportFormat::Csv => {
                let mut summary = Table::new(vec!["name", "kind", "config_sha256", "seed", "assertion", "passed", "detail"]);
                for a in &self.assertions {
                    summary.push(vec![
                        self.name.clone(),
                        self.kind.to_string(),
                        self.config_hash.clone(),
                        self.seed.to_string(),
                        a.name.clone(),
                        a.passed.to_string(),
                        a.detail.clone(),
                    ]);
                }
                let path = dir.join(format!("{}.assertions.csv", self.name));
                write_csv(&path, &summary)?;
                written.push(path);
                for (tname, table) in &self.tables {
                    let path = dir.join(format!("{}.{tname}.csv", self.name));
                    write_csv(&path, table)?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
