//! Report rendering. Floats in CSV and text carry 17 significant digits; JSON
//! uses the shortest representation that round-trips.

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Missing,
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Float(f) => serde_json::Number::from_f64(*f).map(Value::Number).unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Missing => Value::Null,
        }
    }

    fn to_text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => float(*f),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone)]
pub enum Body {
    Record(Value),
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Cell>> },
}

pub fn render(config: &RunConfig, body: &Body) -> Result<String, CliError> {
    let cfg = serde_json::to_value(config)?;
    match config.format {
        Format::Json => {
            let mut out = Map::new();
            out.insert("config".into(), cfg);
            match body {
                Body::Record(v) => {
                    out.insert("report".into(), v.clone());
                }
                Body::Table { columns, rows } => {
                    out.insert("columns".into(), Value::from(columns.clone()));
                    let rows: Vec<Value> =
                        rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
                    out.insert("rows".into(), Value::Array(rows));
                }
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(out))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let (columns, rows) = tabulate(body);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&columns)?;
            for r in &rows {
                w.write_record(r)?;
            }
            let data = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            let table = String::from_utf8(data).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(format!("{CONFIG_PREFIX}{}\n{table}", serde_json::to_string(&cfg)?))
        }
        Format::Text => {
            let (columns, rows) = tabulate(body);
            let mut widths: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
            for r in &rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            let mut out = format!("{CONFIG_PREFIX}{}\n", serde_json::to_string(&cfg)?);
            out.push_str(&line(&columns));
            out.push('\n');
            for r in &rows {
                out.push_str(&line(r));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Tables pass through; records become `key,value` rows with dotted paths.
fn tabulate(body: &Body) -> (Vec<String>, Vec<Vec<String>>) {
    match body {
        Body::Table { columns, rows } => (
            columns.iter().map(|c| c.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(Cell::to_text).collect()).collect(),
        ),
        Body::Record(v) => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            (vec!["key".into(), "value".into()], rows.into_iter().map(|(k, v)| vec![k, v]).collect())
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => {
            let text = if n.is_f64() { float(n.as_f64().unwrap_or(f64::NAN)) } else { n.to_string() };
            out.push((prefix.to_string(), text));
        }
    }
}
