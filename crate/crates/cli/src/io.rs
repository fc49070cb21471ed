use std::fs::File;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use blockconv::design::{fixture, FIXTURE_NAMES};
use blockconv::{Complex64, ImpulseResponse};
use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Read a sample file: one `re` or `re,im` per line; blank lines and lines
/// starting with `#` are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse_samples(file, &path.display().to_string())
}

pub fn parse_samples(reader: impl io::Read, origin: &str) -> Result<Vec<Complex64>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in io::BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| CliError::Io(origin.to_string(), e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let field = |t: &str| -> Result<f64, CliError> {
            let t = t.trim();
            let v: f64 = t
                .parse()
                .map_err(|_| CliError::parse(origin, line_no, format!("'{t}' is not a number")))?;
            if !v.is_finite() {
                return Err(CliError::parse(origin, line_no, format!("'{t}' is not finite")));
            }
            Ok(v)
        };
        let fields: Vec<&str> = text.split(',').collect();
        let v = match fields.as_slice() {
            [re] => Complex64::new(field(re)?, 0.0),
            [re, im] => Complex64::new(field(re)?, field(im)?),
            _ => {
                return Err(CliError::parse(
                    origin,
                    line_no,
                    format!("expected 're' or 're,im', found {} fields", fields.len()),
                ))
            }
        };
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::parse(origin, 0, "no samples".into()));
    }
    Ok(out)
}

/// A fixture name or a path to a sample file.
pub fn load_filter(source: &str) -> Result<ImpulseResponse, CliError> {
    if FIXTURE_NAMES.contains(&source) {
        return Ok(fixture(source)?);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Io(
            source.to_string(),
            io::Error::new(
                io::ErrorKind::NotFound,
                format!("no such file or fixture (fixtures: {})", FIXTURE_NAMES.join(", ")),
            ),
        ));
    }
    Ok(ImpulseResponse::new(read_samples(path)?)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Missing => Value::Null,
        }
    }
}

/// A table plus summary values that do not fit the rows.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// CSV goes to the sink and the summary to stderr; JSON carries both.
    pub fn emit(&self, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
        let origin = out.map_or("<stdout>".to_string(), |p| p.display().to_string());
        let io_err = |e: io::Error| CliError::Io(origin.clone(), e);
        let mut sink: Box<dyn Write> = match out {
            Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(io_err)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut sink);
                let csv_err = |e: csv::Error| CliError::Io(origin.clone(), e.into());
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv)).map_err(csv_err)?;
                }
                w.flush().map_err(io_err)?;
                drop(w);
                let mut err = io::stderr().lock();
                for (k, v) in &self.summary {
                    let _ = writeln!(err, "{k}: {v}");
                }
            }
            Format::Json => {
                let mut doc = self.summary.clone();
                doc.insert("columns".into(), Value::from(self.columns.clone()));
                let rows = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                    .collect();
                doc.insert("rows".into(), Value::Array(rows));
                serde_json::to_writer_pretty(&mut sink, &Value::Object(doc))
                    .map_err(|e| CliError::Io(origin.clone(), e.into()))?;
                writeln!(sink).map_err(io_err)?;
            }
        }
        sink.flush().map_err(io_err)
    }
}
