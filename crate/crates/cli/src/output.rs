use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use freeqg_core::interval::Bracket;
use freeqg_core::sweep::DECIMAL_DIGITS;

use crate::{Cli, CmdResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Deterministic decimal rendering of a real bracket.
pub fn real(b: &Bracket) -> String {
    b.to_decimal(DECIMAL_DIGITS)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Rows of string cells under a fixed header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, config: Value, cli: &Cli) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), Value::String(c.clone())))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "config": config,
            "rows": rows,
            "meta": {
                "precision_bits": cli.precision_bits,
                "kmax": cli.kmax,
                "version": env!("CARGO_PKG_VERSION"),
            },
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        s
    }

    pub fn emit(&self, cli: &Cli, config: Value) -> CmdResult {
        let text = match cli.format {
            Format::Csv => self.csv(),
            Format::Json => self.json(config, cli),
        };
        write(cli.out.as_deref(), &text)?;
        Ok(())
    }
}
