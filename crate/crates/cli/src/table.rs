use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliError, Format};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => write!(out, "{v:.16e}").unwrap(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Int(v) => Value::from(v),
            Cell::Float(v) => Value::from(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

/// Named columns plus a summary record.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_owned(),
            serde_json::to_value(value).expect("summary values serialize"),
        );
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format, config: &impl Serialize) -> Result<String, CliError> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Invalid(e.to_string()))?;
        if self
            .rows
            .iter()
            .flatten()
            .any(|c| matches!(c, Cell::Float(v) if !v.is_finite()))
        {
            return Err(CliError::Invalid(
                "computation produced a non-finite value".into(),
            ));
        }
        match format {
            Format::Csv => {
                let mut out = String::new();
                writeln!(
                    out,
                    "# presence {} config={} summary={}",
                    env!("CARGO_PKG_VERSION"),
                    config,
                    Value::Object(self.summary.clone())
                )
                .unwrap();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    for (i, cell) in row.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        cell.csv(&mut out);
                    }
                    out.push('\n');
                }
                Ok(out)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            self.columns
                                .iter()
                                .zip(r)
                                .map(|(c, v)| ((*c).to_owned(), v.json()))
                                .collect(),
                        )
                    })
                    .collect();
                let mut doc = Map::new();
                doc.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
                doc.insert("config".into(), config);
                doc.insert("rows".into(), Value::Array(rows));
                doc.insert("summary".into(), Value::Object(self.summary.clone()));
                let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap();
                s.push('\n');
                Ok(s)
            }
        }
    }
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial artifact behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
