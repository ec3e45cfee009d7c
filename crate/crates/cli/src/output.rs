use std::io::Write;
use std::path::Path;

use cesaro_core::{format_f64, Series};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(format_f64(*x)),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
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

    pub fn from_series(f: &Series) -> Self {
        let mut t = Self::new(&["n", "re", "im"]);
        for (n, z) in f.coeffs().iter().enumerate() {
            t.push(vec![n.into(), z.re.into(), z.im.into()]);
        }
        t
    }

    pub fn to_csv(&self, hash: &str) -> Result<Vec<u8>, CliError> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| CliError::internal(e.to_string());
        wr.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        let mut buf = wr
            .into_inner()
            .map_err(|e| CliError::internal(e.to_string()))?;
        writeln!(buf, "# config-hash: {hash}")?;
        Ok(buf)
    }

    pub fn to_json(&self, hash: &str) -> Vec<u8> {
        let rows: Vec<Vec<Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect())
            .collect();
        let v = json!({ "columns": self.columns, "rows": rows, "config_hash": hash });
        let mut s = serde_json::to_vec_pretty(&v).expect("json value serializes");
        s.push(b'\n');
        s
    }
}

/// What a command produced.
pub enum Artifact {
    Table(Table),
    /// A series: `n,re,im` CSV, or a plain JSON pair list that reads back as input.
    Series(Series),
}

/// SHA-256 of the canonical JSON of the command, its parameters and the resolved config.
pub fn config_hash<P: Serialize>(command: &str, params: &P, cfg: &ExperimentConfig) -> String {
    let doc = json!({ "command": command, "params": params, "config": cfg });
    let digest = Sha256::digest(serde_json::to_vec(&doc).expect("json value serializes"));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn render(artifact: &Artifact, format: Format, hash: &str) -> Result<Vec<u8>, CliError> {
    match (artifact, format) {
        (Artifact::Table(t), Format::Csv) => t.to_csv(hash),
        (Artifact::Table(t), Format::Json) => Ok(t.to_json(hash)),
        (Artifact::Series(s), Format::Csv) => Table::from_series(s).to_csv(hash),
        (Artifact::Series(s), Format::Json) => {
            let mut v = s.to_json().into_bytes();
            v.push(b'\n');
            Ok(v)
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| CliError::internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Reads a series from `.csv` (`n,re,im`) or JSON (`[[re, im], ...]`).
pub fn read_series(path: &Path) -> Result<Series, CliError> {
    let open_err =
        |e: std::io::Error| CliError::validation(format!("cannot read {}: {e}", path.display()));
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let s = if is_csv {
        Series::read_csv(std::fs::File::open(path).map_err(open_err)?)
    } else {
        Series::from_json(&std::fs::read_to_string(path).map_err(open_err)?)
    };
    s.map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}
