//! Result tables with metadata, written as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Rows over a fixed column set; cells are keyed by column name.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: Vec<(&'static str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        for (name, cell) in cells {
            let idx = self
                .columns
                .iter()
                .position(|c| *c == name)
                .unwrap_or_else(|| panic!("unknown column {name}"));
            row[idx] = cell;
        }
        self.rows.push(row);
    }
}

/// One in-run assertion.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    pub fn json(&self) -> Value {
        json!({ "name": self.name, "passed": self.passed, "detail": self.detail })
    }
}

pub struct Report {
    pub table: Table,
    pub checks: Vec<Check>,
}

pub struct Metadata {
    pub subcommand: &'static str,
    pub seed: u64,
    pub config: Value,
}

impl Metadata {
    fn json(&self, checks: &[Check]) -> Value {
        json!({
            "version": belltime_core::VERSION,
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config": self.config,
            "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
        })
    }
}

pub fn render(meta: &Metadata, report: &Report, format: Format) -> std::io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => {
            writeln!(buf, "# belltime {}", belltime_core::VERSION)?;
            writeln!(buf, "# subcommand: {}", meta.subcommand)?;
            writeln!(buf, "# seed: {}", meta.seed)?;
            writeln!(buf, "# config: {}", meta.config)?;
            for c in &report.checks {
                writeln!(buf, "# check: {} {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail)?;
            }
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&report.table.columns)?;
            for row in &report.table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .table
                .rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (c, cell) in report.table.columns.iter().zip(row) {
                        m.insert((*c).to_string(), cell.json());
                    }
                    Value::Object(m)
                })
                .collect();
            let doc = json!({ "metadata": meta.json(&report.checks), "rows": rows });
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}
