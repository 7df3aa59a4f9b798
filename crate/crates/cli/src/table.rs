//! Tabular and report output. CSV floats are written with 17 significant
//! digits so that they round-trip exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_owned(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a subcommand produces: rows, or a structured report. Reports are
/// flattened to `key,value` rows for CSV, skipping nested arrays.
pub enum Output {
    Table(Table),
    Report(Value),
}

impl Output {
    pub fn report(value: &impl Serialize) -> Result<Self> {
        Ok(Output::Report(serde_json::to_value(value)?))
    }
}

fn report_rows(value: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    if let Value::Object(map) = value {
        for (k, v) in map {
            let cell = match v {
                Value::Number(n) if n.is_u64() => Cell::Int(n.as_u64().unwrap_or_default()),
                Value::Number(n) => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
                Value::Bool(b) => Cell::Bool(*b),
                Value::String(s) => Cell::Text(s.clone()),
                Value::Null => Cell::Text(String::new()),
                Value::Array(_) | Value::Object(_) => continue,
            };
            t.rows.push(vec![Cell::Text(k.clone()), cell]);
        }
    }
    t
}

fn emit(out: &Output, format: Format, w: &mut impl Write) -> Result<()> {
    match (out, format) {
        (Output::Table(t), Format::Csv) => t.write_csv(&mut *w)?,
        (Output::Table(t), Format::Json) => {
            serde_json::to_writer(&mut *w, &t.to_json())?;
            writeln!(w)?;
        }
        (Output::Report(v), Format::Csv) => report_rows(v).write_csv(&mut *w)?,
        (Output::Report(v), Format::Json) => {
            serde_json::to_writer(&mut *w, v)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

pub fn write(out: &Output, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            emit(out, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit(out, format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
