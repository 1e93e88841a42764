//! Rendering of command results as aligned tables, CSV or JSON.
//!
//! Table and CSV output start with `#` comment lines naming the formulas
//! used and where each parameter came from; JSON carries the same under
//! `"metadata"`.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use gravab_core::{Error, Result};
use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig, Source};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &[&'static str]) -> Self {
        Self { name, headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn aligned(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "{}", line(self.headers.clone())).unwrap();
        writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect())).unwrap();
        }
        out
    }

    fn csv(&self) -> Result<String> {
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(ser)?;
        for r in &self.rows {
            w.write_record(r).map_err(ser)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Shortest representation that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone)]
pub enum Body {
    Tables(Vec<Table>),
    /// Already rendered by the library.
    Text { table: String, csv: String },
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub formulas: Vec<&'static str>,
    pub body: Body,
    /// Must be a JSON object; `"metadata"` is added on render.
    pub json: Value,
}

fn metadata(report: &Report, run: &RunConfig) -> Value {
    let provenance: Map<String, Value> =
        run.provenance.iter().map(|p| (p.key.to_string(), Value::String(p.source.to_string()))).collect();
    let mut meta = json!({
        "command": report.command,
        "formulas": report.formulas,
        "provenance": provenance,
        "fallbacks": run.fallbacks(),
    });
    if run.timestamp {
        meta["timestamp"] = json!(unix_time());
    }
    meta
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn comment_header(report: &Report, run: &RunConfig) -> String {
    let mut out = String::new();
    writeln!(out, "# gravab {}", report.command).unwrap();
    writeln!(out, "# formulas: {}", report.formulas.join(", ")).unwrap();
    let by = |src: Source| run.provenance.iter().filter(|p| p.source == src).map(|p| p.key).collect::<Vec<_>>();
    for src in [Source::Flag, Source::Config, Source::Environment, Source::PaperBaseline, Source::Derived, Source::Fallback] {
        let keys = by(src);
        if !keys.is_empty() {
            let label = if src == Source::Fallback { "fallback to baseline".to_string() } else { src.to_string() };
            writeln!(out, "# {label}: {}", keys.join(", ")).unwrap();
        }
    }
    if run.timestamp {
        writeln!(out, "# timestamp: {}", unix_time()).unwrap();
    }
    out
}

pub fn render(report: &Report, run: &RunConfig) -> Result<String> {
    match run.format {
        OutputFormat::Json => {
            let mut data = report.json.clone();
            let obj = data
                .as_object_mut()
                .ok_or_else(|| Error::Serialization("report body is not a JSON object".into()))?;
            obj.insert("metadata".into(), metadata(report, run));
            let mut s = serde_json::to_string_pretty(&data).map_err(|e| Error::Serialization(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        fmt => {
            let mut out = comment_header(report, run);
            match &report.body {
                Body::Text { table, csv } => out.push_str(if fmt == OutputFormat::Csv { csv } else { table }),
                Body::Tables(tables) => {
                    for (i, t) in tables.iter().enumerate() {
                        if i > 0 {
                            out.push('\n');
                        }
                        if tables.len() > 1 {
                            writeln!(out, "# {}", t.name).unwrap();
                        }
                        out.push_str(&if fmt == OutputFormat::Csv { t.csv()? } else { t.aligned() });
                    }
                }
            }
            Ok(out)
        }
    }
}
