//! Minimal CSV emission and ingestion for the tool's fixed schemas: comma
//! delimiter, header row, `.` decimal, shortest-round-trip float formatting,
//! `inf`/`nan` literals allowed only where margins can be unbounded.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

/// Shortest representation that parses back to the identical bits;
/// non-finite values use lowercase literals.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:?}")
    }
}

/// In-memory CSV table builder.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width mismatch");
        self.rows.push(cells);
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        self.push_row(values.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())
            .with_context(|| format!("writing {}", path.display()))
    }
}

/// Parse one of the tool's own CSV files back into header and string cells.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .context("empty CSV file")?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    Ok((header, rows))
}

/// Parse a float cell, accepting the `inf`/`-inf`/`nan` literals.
pub fn parse_f64(cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .with_context(|| format!("cell `{cell}` is not a number"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-17,
            1e300,
            0.0,
            -0.0,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ] {
            let s = fmt_f64(x);
            let back = parse_f64(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
        assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
    }
}
