use std::fs;
use std::path::Path;

use serde::Serialize;
use wrtlab::assembly::Tool;
use wrtlab::json::fmt17;

use crate::error::CliError;

/// The effective configuration of a run, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: Tool,
    pub command: String,
    pub config: serde_json::Value,
}

impl Manifest {
    pub fn new<A: Serialize>(command: &str, args: &A) -> Result<Self, CliError> {
        Ok(Self {
            tool: Tool::current(),
            command: command.into(),
            config: serde_json::to_value(args)?,
        })
    }
}

/// One thresholded quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// "<=" or ">=".
    pub relation: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: "<=".into(),
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: ">=".into(),
            passed: value >= threshold,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub manifest: Manifest,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(manifest: Manifest, checks: Vec<Check>, result: T) -> Self {
        Self {
            manifest,
            passed: checks.iter().all(|c| c.passed),
            checks,
            result,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let s = wrtlab::json::to_string(value)?;
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

/// CSV with a `#` line carrying the manifest, then the header row, then the
/// rows; floats are written with 17 significant digits.
pub struct CsvOut {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub enum Cell {
    F(f64),
    I(u64),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::I(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as u64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::I(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.into())
    }
}

impl CsvOut {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(
            cells
                .into_iter()
                .map(|c| match c {
                    Cell::F(x) => fmt17(x),
                    Cell::I(i) => i.to_string(),
                    Cell::S(s) => s,
                })
                .collect(),
        );
    }

    pub fn write(&self, path: &Path, manifest: &Manifest) -> Result<(), CliError> {
        let mut buf = format!("# {}\n", serde_json::to_string(manifest)?).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        fs::write(path, buf).map_err(|e| CliError::io(path, e))
    }
}
