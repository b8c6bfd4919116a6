//! Tables and their CSV / JSON renderings.
//!
//! CSV: header row, RFC 4180 quoting, floats as `{:.16e}` (17 significant
//! digits, so every value re-parses to the same double). JSON: a one-row
//! table becomes a flat object of its columns; longer tables become
//! `{"rows": [...]}`. In both cases the run manifest sits under "manifest".

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl Cell {
    pub fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits in scientific notation; non-finite values as
/// `NaN`, `inf`, `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// A one-row table from (column, value) pairs.
    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (cols, row): (Vec<&str>, Vec<Cell>) = fields.into_iter().unzip();
        let mut t = Table::new(&cols);
        t.push(row);
        t
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(vec![]);
        let map = |e: csv::Error| CliError::Input(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(map)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text)).map_err(map)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Parses CSV written by [`Table::to_csv`]. Cells that parse as numbers
    /// come back as numbers, so writing the result again is byte-identical.
    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let map = |e: csv::Error| CliError::Input(format!("csv: {e}"));
        let columns = r.headers().map_err(map)?.iter().map(String::from).collect();
        let mut rows = vec![];
        for rec in r.records() {
            rows.push(rec.map_err(map)?.iter().map(parse_cell).collect());
        }
        Ok(Table { columns, rows })
    }

    pub fn to_json(&self, manifest: &Value) -> Value {
        let row_obj = |row: &Vec<Cell>| -> Map<String, Value> {
            self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()
        };
        let mut obj = if self.rows.len() == 1 {
            row_obj(&self.rows[0])
        } else {
            let mut m = Map::new();
            m.insert("rows".into(), Value::Array(self.rows.iter().map(|r| Value::Object(row_obj(r))).collect()));
            m
        };
        obj.insert("manifest".into(), manifest.clone());
        Value::Object(obj)
    }
}

fn parse_cell(s: &str) -> Cell {
    if s.is_empty() {
        return Cell::Empty;
    }
    if let Ok(i) = s.parse::<i64>() {
        if i.to_string() == s {
            return Cell::Int(i);
        }
    }
    if let Ok(v) = s.parse::<f64>() {
        if format_float(v) == s {
            return Cell::Num(v);
        }
    }
    match s {
        "true" => Cell::Bool(true),
        "false" => Cell::Bool(false),
        _ => Cell::Text(s.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Writes `table` to `out` (or stdout). With a file destination the manifest
/// also goes to `<out>.manifest.json`.
pub fn emit(table: &Table, format: Format, out: Option<&Path>, manifest: &Value) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json(manifest)).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    match out {
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?;
        }
        Some(path) => {
            write_file(path, text.as_bytes())?;
            let mpath = manifest_path(path);
            let m = serde_json::to_string_pretty(manifest).expect("JSON values serialize") + "\n";
            write_file(&mpath, m.as_bytes())?;
        }
    }
    Ok(())
}

pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    s.into()
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), "a,b\r\n");
    }

    #[test]
    fn quoting_and_round_trip() {
        let mut t = Table::new(&["name", "x", "n", "flag", "gap"]);
        t.push(vec!["a,b \"q\"".into(), 0.1.into(), 3usize.into(), true.into(), Cell::Empty]);
        t.push(vec!["plain".into(), (-1e-300).into(), 0usize.into(), false.into(), f64::NAN.into()]);
        let csv = t.to_csv().unwrap();
        assert!(csv.contains("\"a,b \"\"q\"\"\""));
        assert_eq!(Table::from_csv(&csv).unwrap().to_csv().unwrap(), csv);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(2.5), "2.5000000000000000e0");
    }

    #[test]
    fn json_shapes() {
        let m = Value::from("m");
        let one = Table::record(vec![("q", 2.5.into())]).to_json(&m);
        assert_eq!(one["q"], 2.5);
        assert_eq!(one["manifest"], "m");
        let mut two = Table::new(&["x"]);
        two.push(vec![1.0.into()]);
        two.push(vec![2.0.into()]);
        assert_eq!(two.to_json(&m)["rows"][1]["x"], 2.0);
    }
}
