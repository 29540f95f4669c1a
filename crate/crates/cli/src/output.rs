//! Tabular results written as CSV (config and summary as leading `#` lines)
//! or as a single JSON document.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn to_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // shortest round-trip form, switching to exponent notation for extremes
            Cell::Float(v) => format!("{v:?}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    /// Fully resolved configuration.
    pub config: Value,
    /// Derived scalars (maxima, fits, crossings).
    pub summary: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(config: &impl Serialize, columns: Vec<&'static str>) -> Result<Self, CliError> {
        Ok(Self { config: serde_json::to_value(config)?, summary: json!({}), columns, rows: Vec::new() })
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                writeln!(out, "# config: {}", serde_json::to_string(&self.config)?)?;
                if self.summary.as_object().is_some_and(|m| !m.is_empty()) {
                    writeln!(out, "# summary: {}", serde_json::to_string(&self.summary)?)?;
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_field))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> =
                    self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
                let doc = json!({
                    "config": self.config,
                    "summary": self.summary,
                    "columns": self.columns,
                    "rows": rows,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = Report::new(&json!({"a": 1}), vec!["x", "y"]).unwrap();
        r.summary = json!({"peak": 2.5});
        r.push(vec![1u32.into(), 0.5.into()]);
        let mut buf = Vec::new();
        r.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# config: {\"a\":1}\n# summary: {\"peak\":2.5}\nx,y\n1,0.5\n");
    }

    #[test]
    fn json_layout() {
        let mut r = Report::new(&json!({"a": 1}), vec!["x"]).unwrap();
        r.push(vec![true.into()]);
        let mut buf = Vec::new();
        r.write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0][0], json!(true));
        assert_eq!(v["config"]["a"], json!(1));
    }
}
