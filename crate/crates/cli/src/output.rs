//! JSON and CSV rendering of command reports.
//!
//! Reports are built as `serde_json::Value` with insertion-ordered objects, so
//! CSV columns follow the JSON field order. An array of objects becomes one CSV
//! row per element; a single object becomes one row. Nested arrays and objects
//! are written into a single cell as compact JSON.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn emit(out: &mut impl Write, value: &Value, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, value)?;
            writeln!(out)
        }
        Format::Csv => write_csv(out, value),
    }
}

fn write_csv(out: &mut impl Write, value: &Value) -> std::io::Result<()> {
    let rows: Vec<&Value> = match value {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    };
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(map)) => map.keys().cloned().collect(),
        Some(_) => vec!["value".into()],
        None => return Ok(()),
    };
    w.write_record(&header)?;
    for row in rows {
        let record: Vec<String> = match row {
            Value::Object(map) => header.iter().map(|k| map.get(k).map(cell).unwrap_or_default()).collect(),
            other => vec![cell(other)],
        };
        w.write_record(&record)?;
    }
    w.flush()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        nested => nested.to_string(),
    }
}
