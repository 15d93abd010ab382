//! Rendering of command outcomes.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use cyclosieve::survey::ScanRecord;

use crate::Outcome;

/// Version of the JSON envelope and record layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    result: &'a Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
    Human,
}

pub(crate) fn render(o: &Outcome, format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command: o.command,
        result: &o.result,
    };
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &envelope)?;
            writeln!(out)?;
        }
        Format::Jsonl => match &o.rows {
            Some(rows) => {
                for row in rows {
                    writeln!(out, "{}", serde_json::to_string(row)?)?;
                }
            }
            None => writeln!(out, "{}", serde_json::to_string(&envelope)?)?,
        },
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match &o.rows {
                Some(rows) if !rows.is_empty() => {
                    let header: Vec<String> = match &rows[0] {
                        Value::Object(m) => m.keys().cloned().collect(),
                        _ => vec!["value".into()],
                    };
                    w.write_record(&header)?;
                    for row in rows {
                        let cells: Vec<String> = match row {
                            Value::Object(m) => header.iter().map(|k| cell(m.get(k))).collect(),
                            other => vec![cell(Some(other))],
                        };
                        w.write_record(&cells)?;
                    }
                }
                _ => {
                    w.write_record(["key", "value"])?;
                    if let Value::Object(m) = &o.result {
                        for (k, v) in m {
                            w.write_record([k.as_str(), &cell(Some(v))])?;
                        }
                    }
                }
            }
            out.write_all(&w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?)?;
        }
        Format::Human => {
            for line in &o.human {
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

pub(crate) fn scan_csv_writer() -> csv::Writer<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "p",
        "q",
        "f",
        "n",
        "ordinal",
        "xi",
        "kind",
        "holds",
        "pass_count",
        "mu",
        "error",
    ])
    .expect("writing to memory");
    w
}

pub(crate) fn scan_csv_row(w: &mut csv::Writer<Vec<u8>>, r: &ScanRecord) -> cyclosieve::Result<()> {
    let mu: Vec<String> = r.mu.iter().map(|m| m.to_string()).collect();
    w.write_record([
        r.p.to_string(),
        r.q.to_string(),
        r.f.to_string(),
        r.n.to_string(),
        r.ordinal.to_string(),
        r.xi.to_string(),
        r.kind.label().to_string(),
        r.holds.to_string(),
        r.pass_count.to_string(),
        mu.join(" "),
        r.error.clone().unwrap_or_default(),
    ])
    .map_err(|e| std::io::Error::from(e).into())
}
