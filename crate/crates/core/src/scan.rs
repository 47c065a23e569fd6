//! Row-streaming CSV / JSON writers for parameter scans.
//!
//! CSV starts with `# <config json>` and a header line; each row is flushed
//! as soon as it is written, so an interrupted scan can be resumed by
//! counting rows. The JSON mirror is `{"config": …, "rows": [ … ]}`, also
//! streamed.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs::File;
use std::io::{BufWriter, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One cell of a scan row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl Cell {
    /// 17 significant digits, so values round-trip exactly.
    fn csv(&self) -> String {
        match *self {
            Cell::Real(x) if x.is_nan() => "NaN".into(),
            Cell::Real(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Real(x) if x.is_finite() => Value::from(x),
            Cell::Real(_) => Value::from(self.csv()),
            Cell::Int(n) => Value::from(n),
            Cell::Bool(b) => Value::from(b),
        }
    }
}

/// A scan row: fixed column names and one cell per column.
pub trait ScanRecord {
    fn columns() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// Opens `path` for writing; `-` is stdout.
pub fn open_output(path: &str) -> Result<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

pub struct ScanWriter<W: Write> {
    out: W,
    format: Format,
    columns: &'static [&'static str],
    rows: usize,
}

impl<W: Write> ScanWriter<W> {
    /// Writes the config echo and the header.
    pub fn new(mut out: W, format: Format, config: &Value, columns: &'static [&'static str]) -> Result<Self> {
        let echo = serde_json::to_string(config).map_err(|e| Error::Config(e.to_string()))?;
        match format {
            Format::Csv => {
                writeln!(out, "# {echo}")?;
                writeln!(out, "{}", columns.join(","))?;
            }
            Format::Json => write!(out, "{{\"config\":{echo},\"rows\":[")?,
        }
        out.flush()?;
        Ok(ScanWriter { out, format, columns, rows: 0 })
    }

    pub fn write_cells(&mut self, cells: &[Cell]) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} cells for {} columns",
                cells.len(),
                self.columns.len()
            )));
        }
        match self.format {
            Format::Csv => {
                let line: Vec<String> = cells.iter().map(Cell::csv).collect();
                writeln!(self.out, "{}", line.join(","))?;
            }
            Format::Json => {
                let obj: serde_json::Map<String, Value> =
                    self.columns.iter().zip(cells).map(|(c, v)| (c.to_string(), v.json())).collect();
                let sep = if self.rows == 0 { "" } else { "," };
                write!(self.out, "{sep}\n{}", Value::Object(obj))?;
            }
        }
        self.rows += 1;
        self.out.flush()?;
        Ok(())
    }

    pub fn write<R: ScanRecord>(&mut self, row: &R) -> Result<()> {
        self.write_cells(&row.cells())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> Result<W> {
        if self.format == Format::Json {
            writeln!(self.out, "\n]}}")?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Extracts the config echoed in the first line of a CSV scan, if any.
pub fn echoed_config(text: &str) -> Option<&str> {
    text.lines().next().and_then(|l| l.strip_prefix("# "))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Row(f64, usize);
    impl ScanRecord for Row {
        fn columns() -> &'static [&'static str] {
            &["x", "n"]
        }
        fn cells(&self) -> Vec<Cell> {
            vec![self.0.into(), self.1.into()]
        }
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let cfg = serde_json::json!({"a": 1});
        let mut w = ScanWriter::new(Vec::new(), Format::Csv, &cfg, Row::columns()).unwrap();
        let x = 0.1 + 0.2;
        w.write(&Row(x, 3)).unwrap();
        w.write(&Row(f64::INFINITY, 4)).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# {\"a\":1}");
        assert_eq!(lines[1], "x,n");
        let back: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, x);
        assert_eq!(lines[3], "inf,4");
        assert_eq!(echoed_config(&text), Some("{\"a\":1}"));
    }

    #[test]
    fn json_mirror_parses() {
        let cfg = serde_json::json!({"a": 1});
        let mut w = ScanWriter::new(Vec::new(), Format::Json, &cfg, Row::columns()).unwrap();
        w.write(&Row(1.5, 1)).unwrap();
        w.write(&Row(f64::NAN, 2)).unwrap();
        let v: Value = serde_json::from_slice(&w.finish().unwrap()).unwrap();
        assert_eq!(v["config"]["a"], 1);
        assert_eq!(v["rows"][0]["x"], 1.5);
        assert_eq!(v["rows"][1]["x"], "NaN");
        assert_eq!(v["rows"][1]["n"], 2);
    }

    #[test]
    fn empty_json_and_bad_width() {
        let cfg = Value::Null;
        let w = ScanWriter::new(Vec::new(), Format::Json, &cfg, Row::columns()).unwrap();
        let v: Value = serde_json::from_slice(&w.finish().unwrap()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 0);
        let mut w = ScanWriter::new(Vec::new(), Format::Csv, &cfg, Row::columns()).unwrap();
        assert!(w.write_cells(&[Cell::Real(1.0)]).is_err());
    }
}
