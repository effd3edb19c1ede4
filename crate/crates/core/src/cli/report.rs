//! Rendering of result rows as aligned text, CSV or JSON.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::cli::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn table(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.4}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) if v.contains([',', '"', '\n']) => format!("\"{}\"", v.replace('"', "\"\"")),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // Non-finite values become null.
            Cell::Float(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

/// How the table format lays out rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Header line and one aligned line per row.
    Columns,
    /// One `name  value` line per column; suits single wide rows.
    Vertical,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub layout: Layout,
}

impl Report {
    pub fn new(columns: Vec<&'static str>, layout: Layout) -> Self {
        Self { columns, rows: Vec::new(), layout }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, seed: Option<u64>, draws: Option<usize>) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::Json => self.json(seed, draws),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        match self.layout {
            Layout::Vertical => {
                let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
                for (k, row) in self.rows.iter().enumerate() {
                    if k > 0 {
                        out.push('\n');
                    }
                    for (name, cell) in self.columns.iter().zip(row) {
                        let _ = writeln!(out, "{name:<width$}  {}", cell.table());
                    }
                }
            }
            Layout::Columns => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
                let widths: Vec<usize> = self
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(j, c)| cells.iter().map(|r| r[j].len()).fold(c.len(), usize::max))
                    .collect();
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                let _ = writeln!(out, "{}", line(self.columns.clone()));
                for row in &cells {
                    let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
                }
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, seed: Option<u64>, draws: Option<usize>) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": { "seed": seed, "draws": draws, "version": env!("CARGO_PKG_VERSION") },
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        s.push('\n');
        s
    }
}
