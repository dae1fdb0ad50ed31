//! Tabular results, assertions and their CSV / JSON rendering.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

/// 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => {
                Value::Number(fmt_num(*v).parse::<Number>().expect("formatted float"))
            }
            Cell::Num(_) => Value::Null,
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Output of one subcommand run.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(config: Value, columns: &[&'static str]) -> Self {
        Self {
            config,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.ok)
    }

    /// The table; summary values and assertions go to the diagnostics text.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn diagnostics(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k} = {}", v.csv());
        }
        for a in &self.assertions {
            let verdict = if a.ok { "ok" } else { "FAILED" };
            let _ = writeln!(out, "assert {}: {verdict} ({})", a.name, a.detail);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.json()))
            .collect();
        let assertions: Vec<Value> = self
            .assertions
            .iter()
            .map(|a| json!({ "name": a.name, "ok": a.ok, "detail": a.detail }))
            .collect();
        let doc = json!({
            "config": self.config,
            "results": { "columns": self.columns, "rows": rows, "summary": summary },
            "assertions": assertions,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
        s.push('\n');
        s
    }
}
