// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Tabular reports and their three output formats.
//!
//! CSV columns are the report columns followed by `seed`. JSON carries the
//! same columns and rows plus the metadata block.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qibound_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::{Format, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    /// Missing or non-finite values.
    Null,
}

impl Cell {
    /// Non-finite numbers have no JSON form and become `Null`.
    pub fn num(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Null
        }
    }

    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::num)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn machine(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn human(&self, column: &str) -> String {
        match self {
            Cell::Num(v) if column.ends_with("_db") => format!("{v:.2}"),
            Cell::Num(v) => format!("{v:.6e}"),
            Cell::Null => "-".into(),
            c => c.machine(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub parameters: BTreeMap<String, Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Cell>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name).and_then(|j| self.rows.get(row)?.get(j))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns.iter().map(String::as_str).chain(["seed"]))
            .map_err(io)?;
        let seed = self.metadata.seed.to_string();
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::machine).chain([seed.clone()]))
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let m = &self.metadata;
        let mut out = format!(
            "# {} {} {} seed={}\n",
            m.tool, m.version, m.subcommand, m.seed
        );
        for (k, v) in &m.parameters {
            let _ = writeln!(out, "# {k} = {}", v.machine());
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&self.columns)
                    .map(|(c, name)| c.human(name))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                cells
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain([c.chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        out.push_str(&line(&self.columns));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k}: {}", v.human(k));
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Table => Ok(self.to_table()),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
            }
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            metadata: Metadata {
                tool: "qibound".into(),
                version: "0".into(),
                subcommand: "limit".into(),
                seed: 7,
                tolerances: Tolerances::default(),
                parameters: BTreeMap::from([("t0".into(), Cell::Num(1.0))]),
            },
            columns: vec!["tau".into(), "x_db".into(), "label".into()],
            rows: vec![
                vec![Cell::Num(0.01), Cell::Num(-14.958), Cell::text("a,b")],
                vec![Cell::Num(1.0), Cell::Null, Cell::Int(3)],
            ],
            summary: BTreeMap::new(),
            notes: vec![],
        }
    }

    #[test]
    fn csv_has_header_and_seed_column() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tau,x_db,label,seed");
        assert_eq!(lines[1], "0.01,-14.958,\"a,b\",7");
        assert_eq!(lines[2], "1.0,,3,7");
    }

    #[test]
    fn table_rounds_db_columns() {
        let t = sample().to_table();
        assert!(t.contains("-14.96"));
        assert!(!t.contains("-14.958"));
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(Cell::num(f64::NEG_INFINITY), Cell::Null);
        assert_eq!(Cell::opt(None), Cell::Null);
    }
}
