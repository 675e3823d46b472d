//! Report assembly and rendering.
//!
//! Every invocation produces exactly one [`Report`]: an ordered parameter
//! echo, an ordered set of result fields, and optionally a table (sweep rows
//! or verification checks). Rendering is deterministic byte for byte: field
//! order is fixed by construction, JSON objects sort their keys, and no
//! timing or host information is ever embedded.

use clap::ValueEnum;
use ffdyn_core::{ExactInt, ExactRational};
use serde_json::{Map, Value};

/// Output format selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A tabular payload: sweep rows or verification checks.
pub struct Table {
    /// JSON key the rows live under inside `result`.
    pub key: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// One invocation's worth of output.
pub struct Report {
    pub command: &'static str,
    pub params: Vec<(&'static str, Value)>,
    pub result: Vec<(&'static str, Value)>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, params: Vec::new(), result: Vec::new(), table: None }
    }

    pub fn param(&mut self, key: &'static str, value: Value) -> &mut Self {
        self.params.push((key, value));
        self
    }

    pub fn field(&mut self, key: &'static str, value: Value) -> &mut Self {
        self.result.push((key, value));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_json(&self) -> String {
        let mut artifact = Map::new();
        artifact.insert("name".into(), Value::String(env!("CARGO_PKG_NAME").into()));
        artifact.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));

        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert((*k).into(), v.clone());
        }
        let mut result = Map::new();
        for (k, v) in &self.result {
            result.insert((*k).into(), v.clone());
        }
        if let Some(table) = &self.table {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (col, val) in table.columns.iter().zip(row) {
                        obj.insert((*col).into(), val.clone());
                    }
                    Value::Object(obj)
                })
                .collect();
            result.insert(table.key.into(), Value::Array(rows));
        }

        let mut top = Map::new();
        top.insert("artifact".into(), Value::Object(artifact));
        top.insert("command".into(), Value::String(self.command.into()));
        top.insert("params".into(), Value::Object(params));
        top.insert("result".into(), Value::Object(result));
        let mut out = serde_json::to_string_pretty(&Value::Object(top))
            .expect("report serialization cannot fail");
        out.push('\n');
        out
    }

    /// CSV: one row per table row (prefixed by the scalar parameters so each
    /// row is self-contained), or a single params + result row when there is
    /// no table.
    fn render_csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(table) => {
                let header: Vec<&str> = self
                    .params
                    .iter()
                    .map(|(k, _)| *k)
                    .chain(table.columns.iter().copied())
                    .collect();
                push_csv_row(&mut out, header.iter().map(|s| s.to_string()));
                for row in &table.rows {
                    let cells = self
                        .params
                        .iter()
                        .map(|(_, v)| csv_cell(v))
                        .chain(row.iter().map(csv_cell));
                    push_csv_row(&mut out, cells);
                }
            }
            None => {
                let header: Vec<&str> = self
                    .params
                    .iter()
                    .map(|(k, _)| *k)
                    .chain(self.result.iter().map(|(k, _)| *k))
                    .collect();
                push_csv_row(&mut out, header.iter().map(|s| s.to_string()));
                let cells = self
                    .params
                    .iter()
                    .map(|(_, v)| csv_cell(v))
                    .chain(self.result.iter().map(|(_, v)| csv_cell(v)));
                push_csv_row(&mut out, cells);
            }
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = format!(
            "{} {} :: {}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        for (k, v) in &self.params {
            out.push_str(&format!("  {k} = {}\n", text_cell(v)));
        }
        if !self.result.is_empty() {
            out.push('\n');
        }
        for (k, v) in &self.result {
            out.push_str(&format!("{k} = {}\n", text_cell(v)));
        }
        if let Some(table) = &self.table {
            out.push('\n');
            for row in &table.rows {
                let line: Vec<String> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| format!("{c}={}", text_cell(v)))
                    .collect();
                out.push_str(&format!("  {}\n", line.join("  ")));
            }
        }
        out
    }
}

fn push_csv_row(out: &mut String, cells: impl Iterator<Item = String>) {
    let mut first = true;
    for cell in cells {
        if !first {
            out.push(',');
        }
        first = false;
        if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
            out.push('"');
            out.push_str(&cell.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(&cell);
        }
    }
    out.push('\n');
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn text_cell(v: &Value) -> String {
    csv_cell(v)
}

/// Big integers serialize as decimal strings (no 64-bit truncation).
pub fn int_value(x: &ExactInt) -> Value {
    Value::String(x.to_string())
}

/// Rationals serialize as `numerator/denominator` strings; integers drop the
/// denominator.
pub fn rational_value(x: &ExactRational) -> Value {
    Value::String(rational_string(x))
}

pub fn rational_string(x: &ExactRational) -> String {
    use num_traits::One;
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
