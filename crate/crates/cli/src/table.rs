use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use regulie_core::EvolutionResult;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Named float columns, one row per sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// `t` followed by the row-major entries `m<i>_<j>` of each node.
    pub fn from_evolution(run: &EvolutionResult) -> Self {
        let values = run.path.values();
        let (r, c) = values.first().map(|m| m.shape()).unwrap_or((0, 0));
        let mut cols = vec!["t".to_string()];
        for i in 0..r {
            for j in 0..c {
                cols.push(format!("m{i}_{j}"));
            }
        }
        let mut table = Table::new(&cols);
        for (t, m) in run.path.times().iter().zip(values) {
            let mut row = vec![*t];
            for i in 0..r {
                for j in 0..c {
                    row.push(m[(i, j)]);
                }
            }
            table.push(row);
        }
        table
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                // 17 significant digits
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Array of `{column: value}` objects; non-finite values become `null`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("tables always serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes the table to `path`, or to stdout when no path is given.
pub fn emit_table(table: &Table, format: Format, path: Option<&Path>) -> io::Result<()> {
    let text = table.render(format);
    match path {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
