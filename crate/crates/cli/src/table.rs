//! Tabular output: CSV with a provenance comment row, mirrored as JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use qic_core::linalg::Config;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
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
        v.map_or(Cell::Empty, Into::into)
    }
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn sig12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => sig12(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Numbers go through the same 12-digit rendering as the CSV, so the
    /// two formats carry identical values.
    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => {
                serde_json::from_str(&sig12(*v)).expect("finite numbers render as JSON numbers")
            }
            Cell::Num(v) => Value::String(sig12(*v)),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Run parameters echoed into every output.
#[derive(Debug, Clone)]
pub struct Meta {
    pub command: String,
    pub seed: u64,
    pub cfg: Config,
}

impl Meta {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("command", self.command.clone()),
            ("seed", self.seed.to_string()),
            ("tol_norm", sig12(self.cfg.tol_norm)),
            ("tol_herm", sig12(self.cfg.tol_herm)),
            ("tol_psd", sig12(self.cfg.tol_psd)),
            ("tol_iso", sig12(self.cfg.tol_iso)),
            ("dim_cap", self.cfg.dim_cap.to_string()),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, meta: &Meta) -> Result<String, CliError> {
        let mut out = String::from("#");
        for (k, v) in meta.pairs() {
            out.push_str(&format!(" {k}={v}"));
        }
        out.push('\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(CliError::io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(CliError::io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("CSV output is UTF-8"));
        Ok(out)
    }

    pub fn to_json(&self, meta: &Meta) -> String {
        let header: Map<String, Value> = meta.pairs().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect())
            })
            .collect();
        let doc = json!({ "meta": header, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Prints the table in `format`, or writes it to `out` together with its
/// mirror in the other format (same stem, other extension).
pub fn emit(table: &Table, meta: &Meta, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let csv = table.to_csv(meta)?;
    let json = table.to_json(meta);
    match out {
        None => {
            let text = if format == Format::Csv { csv } else { json };
            std::io::stdout().write_all(text.as_bytes()).map_err(CliError::io)
        }
        Some(path) => {
            let (main, mirror, ext) = match format {
                Format::Csv => (csv, json, "json"),
                Format::Json => (json, csv, "csv"),
            };
            fs::write(path, main).map_err(|e| CliError::io_at(path, e))?;
            let other = path.with_extension(ext);
            fs::write(&other, mirror).map_err(|e| CliError::io_at(&other, e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.75), "0.75");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(sig12(-123456.789), "-123456.789");
        assert_eq!(sig12(1e12), "1e+12");
        assert_eq!(sig12(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_and_json_agree() {
        let meta = Meta { command: "t".into(), seed: 3, cfg: Config::default() };
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![Cell::from(0.1 + 0.2), Cell::from(4usize), Cell::Empty]);
        let csv = t.to_csv(&meta).unwrap();
        assert!(csv.starts_with("# version="));
        assert!(csv.contains("seed=3") && csv.contains("dim_cap=4096"));
        assert!(csv.ends_with("a,b,c\n0.3,4,\n"));
        let json: Value = serde_json::from_str(&t.to_json(&meta)).unwrap();
        assert_eq!(json["rows"][0]["a"], json!(0.3));
        assert_eq!(json["rows"][0]["c"], Value::Null);
    }
}
