//! Report rows and their text, csv and json renderings.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use super::params_io::matrix_json;
use crate::matcore::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Complex(C64),
    Matrix(CMatrix),
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<C64> for Cell {
    fn from(v: C64) -> Self {
        Cell::Complex(v)
    }
}

impl From<CMatrix> for Cell {
    fn from(v: CMatrix) -> Self {
        Cell::Matrix(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

pub type Row = Vec<(&'static str, Cell)>;

pub struct Report {
    pub command: &'static str,
    pub rows: Vec<Row>,
}

/// `%.{digits}g`-style formatting.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |m: &str| -> String {
        if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            m.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mant))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Seventeen significant digits, fixed layout.
pub fn csv_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn text_complex(z: C64) -> String {
    if z.im == 0.0 {
        sig(z.re, 12)
    } else if z.im < 0.0 {
        format!("{}-{}i", sig(z.re, 12), sig(-z.im, 12))
    } else {
        format!("{}+{}i", sig(z.re, 12), sig(z.im, 12))
    }
}

fn text_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => sig(*v, 12),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Complex(z) => text_complex(*z),
        Cell::Matrix(_) => unreachable!("matrices are rendered as blocks"),
        Cell::Empty => "-".into(),
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let has_matrix = report
        .rows
        .iter()
        .any(|r| r.iter().any(|(_, c)| matches!(c, Cell::Matrix(_))));
    if has_matrix {
        for (k, row) in report.rows.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            for (name, cell) in row {
                if let Cell::Matrix(m) = cell {
                    let _ = writeln!(out, "{name}:");
                    let cells: Vec<Vec<String>> = (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| text_complex(m[(i, j)])).collect())
                        .collect();
                    let w = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(0);
                    for r in cells {
                        let line: Vec<String> = r.iter().map(|s| format!("{s:>w$}")).collect();
                        let _ = writeln!(out, "  {}", line.join("  "));
                    }
                } else {
                    let _ = writeln!(out, "{name}: {}", text_cell(cell));
                }
            }
        }
        return out;
    }
    let Some(first) = report.rows.first() else {
        return out;
    };
    let header: Vec<&str> = first.iter().map(|(n, _)| *n).collect();
    let body: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| r.iter().map(|(_, c)| text_cell(c)).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            body.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.clone()));
    for r in &body {
        let _ = writeln!(out, "{}", line(r.iter().map(|s| s.as_str()).collect()));
    }
    out
}

fn csv_header(row: &Row) -> Vec<String> {
    let mut h = Vec::new();
    for (name, cell) in row {
        match cell {
            Cell::Complex(_) => {
                h.push(format!("{name}_re"));
                h.push(format!("{name}_im"));
            }
            Cell::Matrix(m) => {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        h.push(format!("{name}{i}_{j}_re"));
                        h.push(format!("{name}{i}_{j}_im"));
                    }
                }
            }
            _ => h.push(name.to_string()),
        }
    }
    h
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_cells(row: &Row) -> Vec<String> {
    let mut v = Vec::new();
    for (_, cell) in row {
        match cell {
            Cell::Int(x) => v.push(x.to_string()),
            Cell::Num(x) => v.push(csv_num(*x)),
            Cell::Text(s) => v.push(csv_text(s)),
            Cell::Bool(b) => v.push(b.to_string()),
            Cell::Complex(z) => {
                v.push(csv_num(z.re));
                v.push(csv_num(z.im));
            }
            Cell::Matrix(m) => {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        v.push(csv_num(m[(i, j)].re));
                        v.push(csv_num(m[(i, j)].im));
                    }
                }
            }
            Cell::Empty => v.push(String::new()),
        }
    }
    v
}

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    let Some(first) = report.rows.first() else {
        return out;
    };
    let _ = writeln!(out, "{}", csv_header(first).join(","));
    for r in &report.rows {
        let _ = writeln!(out, "{}", csv_cells(r).join(","));
    }
    out
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Int(x) => json!(x),
        Cell::Num(x) => json!(x),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
        Cell::Complex(z) => json!([z.re, z.im]),
        Cell::Matrix(m) => matrix_json(m),
        Cell::Empty => Value::Null,
    }
}

fn render_json(report: &Report) -> String {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (name, cell) in r {
                m.insert(name.to_string(), json_cell(cell));
            }
            Value::Object(m)
        })
        .collect();
    let doc = json!({ "command": report.command, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializing plain values");
    s.push('\n');
    s
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(std::f64::consts::E, 12), "2.71828182846");
        assert_eq!(sig(0.5, 12), "0.5");
        assert_eq!(sig(1e-9, 12), "1e-9");
        assert_eq!(sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(sig(-2.0, 12), "-2");
        assert_eq!(csv_num(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_layout() {
        let rep = Report {
            command: "eval",
            rows: vec![vec![
                ("index", Cell::Int(0)),
                ("z", Cell::Complex(C64::new(1.0, 0.0))),
                (
                    "v",
                    Cell::Matrix(CMatrix::from_element(1, 1, C64::new(2.0, -1.0))),
                ),
            ]],
        };
        assert_eq!(
            render(&rep, Format::Csv),
            "index,z_re,z_im,v0_0_re,v0_0_im\n0,1.0000000000000000e0,0.0000000000000000e0,2.0000000000000000e0,-1.0000000000000000e0\n"
        );
    }
}
