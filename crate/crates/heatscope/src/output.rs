//! Result tables and their CSV/JSON encodings.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Kind};
use crate::error::RunError;

/// Version stamped into every artifact.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell. Floats keep their bits until encoding.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    /// Absent value, an empty CSV field and JSON `null`.
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::UInt(u64::from(v))
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
        v.map_or(Cell::Null, Into::into)
    }
}

/// Shortest decimal that parses back to the same double; non-finite
/// values as `inf`, `-inf`, `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// JSON has no non-finite numbers; they become the strings of [`format_float`].
pub fn float_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(format_float(v))
    }
}

pub fn floats_value(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| float_value(x)).collect())
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Float(v) => float_value(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

/// A named table; every row has one cell per column.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn rows_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| ((*c).to_string(), v.json())).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// Everything one run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub kind: Kind,
    pub seed: u64,
    pub config_hash: String,
    pub config: Value,
    /// The main sweep table, written as `<kind>.csv`.
    pub table: Table,
    /// Extra tables (per-point profiles), written as `<kind>.<name>.csv`.
    pub extra: Vec<Table>,
    /// Fits, witnesses and other non-tabular outputs.
    pub summary: Map<String, Value>,
    /// Method, tolerances and truncation notes.
    pub provenance: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl ResultRecord {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("artifact_version".into(), ARTIFACT_VERSION.into());
        m.insert("config".into(), self.config.clone());
        m.insert("config_hash".into(), self.config_hash.clone().into());
        m.insert("kind".into(), self.kind.as_str().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("columns".into(), self.table.columns.clone().into());
        m.insert("rows".into(), self.table.rows_json());
        m.insert("summary".into(), Value::Object(self.summary.clone()));
        m.insert("provenance".into(), Value::Object(self.provenance.clone()));
        m.insert("warnings".into(), self.warnings.clone().into());
        Value::Object(m)
    }
}

/// SHA-256 of the canonical (sorted-key, compact) JSON form of the config.
pub fn config_hash(cfg: &ExperimentConfig) -> (String, Value) {
    let value = serde_json::to_value(cfg).expect("config serializes");
    let text = serde_json::to_string(&value).expect("value serializes");
    let digest = Sha256::digest(text.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    (hex, value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// CSV bytes of a table with the provenance columns prepended.
pub fn table_csv(table: &Table, record: &ResultRecord) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let mut header = vec!["config_hash", "artifact_version", "seed"];
    header.extend(table.columns.iter().copied());
    w.write_record(&header)?;
    let seed = record.seed.to_string();
    for row in &table.rows {
        let mut fields = vec![record.config_hash.clone(), ARTIFACT_VERSION.to_string(), seed.clone()];
        fields.extend(row.iter().map(Cell::csv_field));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("value serializes");
    out.push(b'\n');
    out
}

/// Writes the record under `dir` and returns the paths written.
pub fn write_record(record: &ResultRecord, dir: &Path, format: Format) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path, e: std::io::Error| RunError::output(format!("{}: {e}", path.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let kind = record.kind.as_str();
    let mut put = |name: String, bytes: Vec<u8>| -> Result<(), RunError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| io(&path, e))?;
        written.push(path);
        Ok(())
    };
    if format.csv() {
        let encode = |t: &Table| table_csv(t, record).map_err(|e| RunError::output(e.to_string()));
        put(format!("{kind}.csv"), encode(&record.table)?)?;
        for t in &record.extra {
            put(format!("{kind}.{}.csv", t.name), encode(t)?)?;
        }
    }
    if format.json() {
        put(format!("{kind}.json"), json_bytes(&record.to_json()))?;
    }
    Ok(written)
}

/// Wall time lives in its own file so the result files stay reproducible.
pub fn write_timing(record: &ResultRecord, dir: &Path, seconds: f64, threads: usize) -> Result<PathBuf, RunError> {
    let mut m = Map::new();
    m.insert("artifact_version".into(), ARTIFACT_VERSION.into());
    m.insert("config_hash".into(), record.config_hash.clone().into());
    m.insert("kind".into(), record.kind.as_str().into());
    m.insert("seed".into(), record.seed.into());
    m.insert("threads".into(), threads.into());
    m.insert("wall_time_seconds".into(), float_value(seconds));
    let path = dir.join(format!("{}.timing.json", record.kind.as_str()));
    fs::write(&path, json_bytes(&Value::Object(m)))
        .map_err(|e| RunError::output(format!("{}: {e}", path.display())))?;
    Ok(path)
}
