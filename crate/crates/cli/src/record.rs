//! Run records and tabular output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::parse::format_number;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunRecord {
    pub fn new(command: &str, seed: u64, config: Value, results: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
            results,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("records are plain data");
        out.push('\n');
        out
    }

    /// `#` metadata line, then the header row, then one line per row.
    pub fn to_csv(&self, table: &Table) -> String {
        let mut out = format!(
            "# schema_version={} version={} command={} seed={} config={}",
            self.schema_version,
            self.version,
            self.command,
            self.seed,
            serde_json::to_string(&self.config).expect("config is plain data"),
        );
        if let Some(ms) = self.wall_time_ms {
            let _ = write!(out, " wall_time_ms={ms}");
        }
        out.push('\n');
        out.push_str(&table.columns.join(","));
        out.push('\n');
        for row in &table.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(t) => Value::from(t.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Rows in grid order; every row has one cell per column.
#[derive(Clone, Debug, PartialEq)]
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
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![0.5.into(), "x,y".into()]);
        let rec = RunRecord::new("demo", 3, Value::Null, Value::Null);
        let csv = rec.to_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# schema_version=1 "));
        assert!(lines[0].contains("seed=3"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "0.5,\"x,y\"");
    }

    #[test]
    fn json_rows_are_keyed() {
        let mut t = Table::new(vec!["q", "ok"]);
        t.push(vec![0.25.into(), true.into()]);
        assert_eq!(t.to_json(), serde_json::json!([{"q": 0.25, "ok": true}]));
        assert!(!RunRecord::new("x", 0, Value::Null, Value::Null).to_json().contains("wall_time_ms"));
    }
}
