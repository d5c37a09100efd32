//! Result tables, CSV rendering and the JSON sidecar.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliResult;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_g17(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// `printf("%.17g")`: 17 significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e17)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Outcome of one acceptance check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Soft checks are reported but never change the exit status.
    pub soft: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn hard(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            soft: false,
            detail: detail.into(),
        }
    }

    pub fn soft(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            soft: true,
            ..Self::hard(name, passed, detail)
        }
    }
}

/// Tabular output of an experiment plus its checks.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<CheckResult>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn hard_failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.soft && !c.passed)
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Path of the JSON sidecar next to a CSV file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub struct RunInfo<'a> {
    pub experiment: &'a str,
    pub config: Value,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub csv_path: &'a Path,
    pub checked: bool,
}

pub fn sidecar(info: &RunInfo, table: &Table) -> Value {
    json!({
        "schema": "metroscope-result/1",
        "experiment": info.experiment,
        "version": env!("METROSCOPE_VERSION"),
        "seed": info.seed,
        "config": info.config,
        "csv": info.csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        "columns": table.columns,
        "rows": table.rows.len(),
        "checks": table.checks,
        "check_mode": info.checked,
        "passed": table.hard_failures().next().is_none(),
        "wall_clock_seconds": info.wall_clock_seconds,
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(format_g17(140.0), "140");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(2.5e20), "2.5e+20");
        assert_eq!(format_g17(-1234.5), "-1234.5");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(f64::NAN), "nan");
        assert_eq!(format_g17(1e16), "10000000000000000");
        assert_eq!(format_g17(1e17), "1e+17");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, 6.02214076e23, -0.000123456789] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::from(1usize), Cell::from(0.5)]);
        t.push(vec![Cell::from("x,y"), Cell::Empty]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\n1,0.5\n\"x,y\",\n");
    }
}
