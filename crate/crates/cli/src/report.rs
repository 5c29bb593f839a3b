use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use fwbesov::experiments::Verdict;

use crate::plot::Plot;

/// CSV table with preformatted cells.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// What a command produces before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub measurements: Value,
    pub fits: Value,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub compute_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport<'a> {
    pub config: Value,
    pub measurements: &'a Value,
    pub fits: &'a Value,
    pub verdicts: &'a [Verdict],
    pub timings: Timings,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WriteError + '_ {
    move |source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), WriteError> {
    let csv_err = |source| WriteError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Write report.json plus the selected tables and plots; returns the paths written.
pub fn write_all(
    dir: &Path,
    report: &ExperimentReport<'_>,
    outcome: &Outcome,
    csv: bool,
    plots: bool,
) -> Result<Vec<PathBuf>, WriteError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(io_err(&path))?;
    written.push(path);
    if csv {
        for t in &outcome.tables {
            let path = dir.join(&t.name);
            write_csv(&path, t)?;
            written.push(path);
        }
    }
    if plots {
        for p in &outcome.plots {
            let path = dir.join(&p.name);
            std::fs::write(&path, p.to_svg()).map_err(io_err(&path))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0), "1.0");
        assert_eq!(num(1e-20), "1e-20");
        let x = 2.0f64.sqrt();
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_uses_lf() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t.csv", &["a", "b"]);
        t.push(vec![num(1.0), num(0.5)]);
        let p = dir.path().join("t.csv");
        write_csv(&p, &t).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "a,b\n1.0,0.5\n");
    }
}
