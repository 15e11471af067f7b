use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Format, Request};

pub const CONVENTION: &str =
    "Wigner values use the half-normalized convention: the integral of W over d^2 alpha is 1/2, with alpha = (q + ip)/sqrt(2)";

/// One table cell. Empty where the quantity is undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            other => serde_json::to_value(other).expect("cells serialize"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Empty
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::from)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn columns_json(&self) -> Value {
        let mut cols = Map::new();
        for (i, name) in self.header.iter().enumerate() {
            cols.insert(
                name.clone(),
                self.rows.iter().map(|row| row[i].json()).collect(),
            );
        }
        Value::Object(cols)
    }
}

pub struct Report {
    pub request: Request,
    pub summary: Value,
    pub table: Table,
    pub default_format: Format,
}

pub fn metadata(elapsed: Option<f64>) -> Value {
    let mut meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "convention": CONVENTION,
    });
    if let Some(secs) = elapsed {
        meta["elapsed_seconds"] = json!(secs);
    }
    meta
}

/// `{"params", "summary", "values", "metadata"}` as pretty JSON.
pub fn envelope(report: &Report, meta: &Value, with_values: bool) -> String {
    let mut env = json!({
        "params": report.request,
        "summary": report.summary,
    });
    if with_values {
        env["values"] = report.table.columns_json();
    }
    env["metadata"] = meta.clone();
    let mut text = serde_json::to_string_pretty(&env).expect("envelope serializes");
    text.push('\n');
    text
}

/// Header comment with the request as one JSON line, then `header` and rows.
pub fn write_csv(out: &mut impl Write, report: &Report) -> io::Result<()> {
    let echo = serde_json::to_string(&report.request).expect("request serializes");
    writeln!(out, "# {echo}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&report.table.header)?;
    for row in &report.table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}

/// Pulls the echoed request back out of either output format.
pub fn read_request(text: &str) -> Result<(Request, Format), String> {
    if let Some(rest) = text.strip_prefix("# ") {
        let line = rest.lines().next().unwrap_or_default();
        let req = serde_json::from_str(line).map_err(|e| format!("bad CSV parameter line: {e}"))?;
        return Ok((req, Format::Csv));
    }
    let value: Value =
        serde_json::from_str(text).map_err(|e| format!("not a CSV or JSON output file: {e}"))?;
    let params = value
        .get("params")
        .cloned()
        .ok_or("JSON file has no params block")?;
    let req = serde_json::from_value(params).map_err(|e| format!("bad params block: {e}"))?;
    Ok((req, Format::Json))
}
