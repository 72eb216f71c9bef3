use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Rows of numbers under named columns.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Every number with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn columns(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

#[derive(Serialize)]
struct JsonDoc<'a, M: Serialize> {
    #[serde(flatten)]
    table: &'a Table,
    meta: M,
}

/// Write `table` to `path` (or stdout) in the requested format. `meta` is
/// attached to JSON output only.
pub fn emit<M: Serialize>(table: &Table, meta: M, path: Option<&Path>, format: Format) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&JsonDoc { table, meta })
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    write_text(&text, path)
}

pub fn write_text(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_every_number() {
        let mut t = Table::new(vec!["t".into(), "x_1".into()]);
        t.push(vec![0.1, std::f64::consts::PI]);
        t.push(vec![1e-300, -2.0 / 3.0]);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x_1"));
        for (line, row) in lines.zip(&t.rows) {
            let back: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(&back, row);
        }
    }
}
