//! Output in the three supported formats.

use std::io::{self, Write};

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Json,
    Csv,
}

/// A command's result: a flat table for pretty/csv and a structured value
/// for json.
pub struct Output {
    pub title: Option<String>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    /// Extra lines shown only in pretty mode.
    pub footer: Vec<String>,
}

impl Output {
    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json).map_err(io::Error::from)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.headers).map_err(io::Error::from)?;
                for row in &self.rows {
                    w.write_record(row).map_err(io::Error::from)?;
                }
                w.flush()?;
            }
            Format::Pretty => {
                if let Some(t) = &self.title {
                    writeln!(out, "{t}")?;
                }
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                let line = |cells: &mut dyn Iterator<Item = &str>| {
                    cells
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(out, "{}", line(&mut self.headers.iter().copied()))?;
                for row in &self.rows {
                    writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
                }
                for f in &self.footer {
                    writeln!(out, "{f}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn labels(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}
