//! Deterministic table rendering (CSV and JSON) and output-path handling.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Floating-point serialization with 12 significant digits, stable across
/// runs and platforms.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// One table cell: a number (rendered with [`fmt_sig`]) or a label.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x),
            Cell::Text(t) => t.clone(),
        }
    }

    fn to_json(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x),
            Cell::Text(t) => format!("\"{}\"", t.replace('\\', "\\\\").replace('"', "\\\"")),
        }
    }
}

/// A rendered sweep result: named columns plus rows in sweep order.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Comma-separated, UTF-8, LF line endings, header row always present.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Schema-versioned JSON with one object per row, field order fixed.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{{\"schema_version\":1,\"command\":\"{}\",\"rows\":[",
            self.command
        ));
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("\"{col}\":{}", cell.to_json()));
            }
            out.push('}');
        }
        out.push_str("]}\n");
        out
    }
}

/// Output encoding selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// Writes `content` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_lf_terminated_with_header() {
        let t = Table {
            command: "demo",
            columns: vec!["s", "branch"],
            rows: vec![vec![Cell::Num(0.5), Cell::Text("interior".into())]],
        };
        let csv = t.to_csv();
        assert!(csv.starts_with("s,branch\n"));
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
        assert!(csv.contains("5.00000000000e-1,interior"));
    }

    #[test]
    fn sig_digits_are_twelve() {
        assert_eq!(fmt_sig(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_sig(0.0), "0.00000000000e0");
    }

    #[test]
    fn json_has_schema_version() {
        let t = Table {
            command: "demo",
            columns: vec!["k"],
            rows: vec![vec![Cell::Num(1.0)]],
        };
        let json = t.to_json();
        assert!(json.contains("\"schema_version\":1"));
        assert!(json.contains("\"command\":\"demo\""));
    }
}
