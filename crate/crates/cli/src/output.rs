use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i128),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

/// 17 significant digits, enough to round-trip any binary64.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_float(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::String(format_float(x))
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => json_float(*x),
            Cell::Int(i) => Value::Number(i.to_string().parse().expect("integer")),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// The result of one run.
#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub wall_time: Option<f64>,
    /// Failed checks; only `verify` sets it.
    pub failures: usize,
}

impl Record {
    pub fn new(command: &str, config: Value, seed: u64, columns: Vec<&'static str>) -> Self {
        Self { command: command.to_string(), config, seed, columns, rows: Vec::new(), wall_time: None, failures: 0 }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        m.insert("tool".into(), Value::from(env!("CARGO_PKG_NAME")));
        m.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("seed".into(), Value::Number(self.seed.into()));
        m.insert("config".into(), self.config.clone());
        m.insert("columns".into(), Value::from(self.columns.clone()));
        let rows = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        m.insert("rows".into(), Value::Array(rows));
        if let Some(w) = self.wall_time {
            m.insert("wall_time_seconds".into(), json_float(w));
        }
        Value::Object(m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// Writes the record; CSV output gets a `<file>.config.json` companion holding
    /// everything except the table.
    pub fn write(&self, path: &Path, format: Format) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.to_json()).expect("serialisable");
                text.push('\n');
                fs::write(path, text)
            }
            Format::Csv => {
                fs::write(path, self.to_csv())?;
                let mut meta = self.to_json();
                if let Value::Object(m) = &mut meta {
                    m.remove("rows");
                }
                let mut side = fs::File::create(companion(path))?;
                writeln!(side, "{}", serde_json::to_string_pretty(&meta).expect("serialisable"))
            }
        }
    }
}

pub fn companion(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".config.json");
    name.into()
}

/// The embedded configuration: every parameter that can change the output.
#[derive(Debug, Clone)]
pub struct EmbeddedConfig {
    pub command: crate::args::Command,
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub t_scale: Option<f64>,
    pub y: Option<f64>,
    pub q: Option<u64>,
    pub z1: Option<String>,
    pub z2: Option<String>,
    pub n_samples: Option<usize>,
    pub n_points: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl EmbeddedConfig {
    /// Flag names (underscored) to values; floats keep 17 digits and infinities
    /// are stored as strings so the record parses back to the same run.
    pub fn to_value(&self) -> Value {
        let float = |x: Option<f64>| x.map_or(Value::Null, json_float);
        let int = |x: Option<u64>| x.map_or(Value::Null, |v| Value::Number(v.into()));
        let text = |x: &Option<String>| x.clone().map_or(Value::Null, Value::String);
        let command = serde_json::to_value(self.command).expect("serialisable");
        let mut m = Map::new();
        m.insert("command".into(), command);
        m.insert("tau".into(), float(self.tau));
        m.insert("theta".into(), float(self.theta));
        m.insert("T".into(), float(self.t_scale));
        m.insert("y".into(), float(self.y));
        m.insert("q".into(), int(self.q));
        m.insert("z1".into(), text(&self.z1));
        m.insert("z2".into(), text(&self.z2));
        m.insert("n_samples".into(), int(self.n_samples.map(|n| n as u64)));
        m.insert("n_points".into(), int(self.n_points.map(|n| n as u64)));
        m.insert("seed".into(), Value::Number(self.seed.into()));
        m.insert("tol".into(), float(self.tol));
        m.insert("lo".into(), float(self.lo));
        m.insert("hi".into(), float(self.hi));
        Value::Object(m)
    }
}
