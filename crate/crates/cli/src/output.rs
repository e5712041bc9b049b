//! CSV tables with a commented header, and JSON reports that echo the
//! configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub struct Column {
    pub name: &'static str,
    pub doc: &'static str,
}

pub const fn column(name: &'static str, doc: &'static str) -> Column {
    Column { name, doc }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Missing,
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Missing => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

pub struct Table {
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: Vec<Column>) -> Self {
        Self {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(out, "# {}", self.title)?;
        for c in &self.columns {
            writeln!(out, "# {}: {}", c.name, c.doc)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let columns: Map<String, Value> = self
            .columns
            .iter()
            .map(|c| (c.name.to_owned(), json!(c.doc)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.name.to_owned(), v.json()))
                        .collect(),
                )
            })
            .collect();
        json!({ "title": self.title, "columns": columns, "rows": rows })
    }
}

/// Owns the output directory; every file goes through here so that a run
/// writes from one place.
pub struct Sink {
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(&config.out).with_context(|| format!("creating {}", config.out.display()))?;
        Ok(Self {
            dir: config.out.clone(),
            format: config.format,
            written: Vec::new(),
        })
    }

    pub fn subdir(&self, name: &str) -> Result<PathBuf> {
        let d = self.dir.join(name);
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }

    /// Writes `table` as `<stem>.csv` or, with JSON output, as `<stem>.json`
    /// wrapped with the configuration.
    pub fn table(&mut self, stem: &str, table: &Table, config: &RunConfig) -> Result<()> {
        match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{stem}.csv"));
                table.write_csv(&path)?;
                self.written.push(path);
                Ok(())
            }
            Format::Json => self.report(stem, &table.to_json(), config),
        }
    }

    /// Plain CSV at an explicit path, used for snapshots.
    pub fn csv_at(&mut self, path: PathBuf, table: &Table) -> Result<()> {
        table.write_csv(&path)?;
        self.written.push(path);
        Ok(())
    }

    /// `<stem>.json` holding `{"config": …, "report": …}`.
    pub fn report(&mut self, stem: &str, report: &impl Serialize, config: &RunConfig) -> Result<()> {
        let path = self.dir.join(format!("{stem}.json"));
        let body = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "report": report,
        });
        let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        serde_json::to_writer_pretty(&mut out, &body)?;
        writeln!(out)?;
        out.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_documented_header() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", vec![column("x", "abscissa"), column("flag", "label")]);
        t.push(vec![0.5.into(), "ok".into()]);
        t.push(vec![Cell::Missing, "none".into()]);
        let p = dir.path().join("t.csv");
        t.write_csv(&p).unwrap();
        let text = fs::read_to_string(p).unwrap();
        assert_eq!(text, "# demo\n# x: abscissa\n# flag: label\nx,flag\n5e-1,ok\n,none\n");
        let j = t.to_json();
        assert_eq!(j["rows"][1]["x"], Value::Null);
        assert_eq!(j["columns"]["x"], "abscissa");
    }
}
