//! Minimal CSV writer: one header line, numbers in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

/// Shortest decimal string that parses back to the same `f64`.
///
/// Plain notation in the usual range, exponent notation outside it.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(v) => format_float(*v),
    }
}

pub fn render(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(format_cell).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn write(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    fs::write(path, render(header, rows)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
