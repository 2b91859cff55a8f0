//! Artifact writers. Floats use the shortest decimal that round-trips; every
//! CSV starts with a `# config_hash=… version=…` line.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};
use surfint_core::harness::Verdict;

use crate::run::{SpectrumRow, SweepRow};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_ID: &str = "surfint-report/1";

pub fn fmt_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn table(hash: &str, header: &[String], rows: Vec<Vec<String>>) -> io::Result<Vec<u8>> {
    let mut out = format!("# config_hash={hash} version={VERSION}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
    }
    Ok(out)
}

pub fn spectrum_csv(hash: &str, rows: &[SpectrumRow]) -> io::Result<Vec<u8>> {
    let header = ["k_index", "eigenvalue", "k_value_if_interval", "residual"].map(String::from);
    let body = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vec![(i + 1).to_string(), fmt_f64(r.eigenvalue), opt(r.k), opt(r.residual)])
        .collect();
    table(hash, &header, body)
}

/// One row per compared pair `k`.
pub fn verdicts_csv(hash: &str, verdicts: &[Verdict]) -> io::Result<Vec<u8>> {
    let header = ["case_index", "case_id", "geometry", "k", "lower", "upper", "ordering_ok", "margin", "tolerance"]
        .map(String::from);
    let mut body = Vec::new();
    for (i, v) in verdicts.iter().enumerate() {
        let id = v.case_id.map(|c| c.as_str()).unwrap_or("");
        for (k, (lo, up)) in v.lower.iter().zip(&v.upper).enumerate() {
            body.push(vec![
                i.to_string(),
                id.to_string(),
                v.geometry.clone(),
                (k + 1).to_string(),
                fmt_f64(*lo),
                fmt_f64(*up),
                v.ordering_ok.to_string(),
                fmt_f64(v.margin),
                fmt_f64(v.tolerance),
            ]);
        }
    }
    table(hash, &header, body)
}

/// `param, lambda_1 … lambda_n, N, m_A` with `n` the largest count seen.
pub fn sweep_csv(hash: &str, parameter: &str, rows: &[SweepRow]) -> io::Result<Vec<u8>> {
    let n = rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0).max(1);
    let mut header = vec![parameter.to_string()];
    header.extend((1..=n).map(|i| format!("lambda_{i}")));
    header.push("N".into());
    header.push("m_A".into());
    let body = rows
        .iter()
        .map(|r| {
            let mut rec = vec![fmt_f64(r.value)];
            rec.extend((0..n).map(|i| opt(r.eigenvalues.get(i).copied())));
            rec.push(r.count.to_string());
            rec.push(opt(r.m_a));
            rec
        })
        .collect();
    table(hash, &header, body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerdictFailed,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::VerdictFailed => "verdict_failed",
            Status::Error => "error",
        }
    }
}

pub struct Provenance<'a> {
    pub config_hash: Option<&'a str>,
    pub task: Option<&'a str>,
    pub config: Option<Value>,
}

pub fn envelope(p: &Provenance<'_>, status: Status, result: Option<Value>, error: Option<Value>) -> Value {
    json!({
        "schema": SCHEMA_ID,
        "provenance": {
            "config_hash": p.config_hash,
            "version": VERSION,
            "task": p.task,
            "config": p.config,
        },
        "status": status.as_str(),
        "result": result,
        "error": error,
    })
}

pub fn error_value(kind: &str, message: &str, details: Value) -> Value {
    json!({ "kind": kind, "message": message, "details": details })
}

pub fn write_json(dir: &Path, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)
}
