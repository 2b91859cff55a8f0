//! Batch front-end: JSON config in, CSV tables and a JSON report out.
//!
//! Exit codes: `0` success, `2` configuration or solver failure, `3` an ordering
//! (`compare`) or certificate (`certify`) was violated.

pub mod config;
pub mod output;
pub mod run;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{parse_config, ConfigError, Format, RunConfig, Task};
use crate::output::{envelope, error_value, Provenance, Status};
use crate::run::{execute, Outcome, RunError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;

pub const DEFAULT_OUT: &str = "surfint-out";

/// The shipped JSON schema of `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone)]
pub struct Invocation {
    pub task: Task,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub verbose: bool,
}

fn threads() -> Option<usize> {
    std::env::var("SURFINT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Reads, validates and runs; the returned code is the process exit code.
pub fn run_invocation(inv: &Invocation) -> i32 {
    let log = |msg: &str| {
        if inv.verbose {
            eprintln!("surfint: {msg}");
        }
    };
    let fallback_dir = inv.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let fail = |dir: &Path, p: &Provenance<'_>, err: Value| -> i32 {
        eprintln!("surfint: {}", err["message"].as_str().unwrap_or("error"));
        if fs::create_dir_all(dir).is_ok() {
            let _ = output::write_json(dir, &envelope(p, Status::Error, None, Some(err)));
        }
        EXIT_FAILURE
    };
    let bare = Provenance {
        config_hash: None,
        task: Some(inv.task.as_str()),
        config: None,
    };

    let text = match fs::read_to_string(&inv.config) {
        Ok(t) => t,
        Err(e) => {
            let msg = format!("cannot read {}: {e}", inv.config.display());
            return fail(&fallback_dir, &bare, error_value("io", &msg, Value::Null));
        }
    };
    let config = match prepare(inv.task, &text) {
        Ok(c) => c,
        Err(ConfigError::Parse(e)) => {
            let details = json!({ "line": e.line, "column": e.column });
            return fail(&fallback_dir, &bare, error_value("parse", &e.to_string(), details));
        }
        Err(ConfigError::Validation(e)) => {
            let details = json!({ "violations": e.violations });
            return fail(&fallback_dir, &bare, error_value("validation", &e.to_string(), details));
        }
    };

    let dir = inv
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let hash = config.hash();
    let prov = Provenance {
        config_hash: Some(&hash),
        task: Some(inv.task.as_str()),
        config: serde_json::to_value(&config).ok(),
    };
    if let Err(e) = fs::create_dir_all(&dir) {
        let msg = format!("cannot create {}: {e}", dir.display());
        return fail(&dir, &prov, error_value("io", &msg, Value::Null));
    }
    log(&format!("task {} config_hash {hash}", inv.task));

    let outcome = match threads() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&config)),
            Err(e) => Err(RunError::Solver(format!("thread pool: {e}"))),
        },
        None => execute(&config),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let (kind, details) = match &e {
                RunError::Solver(_) => ("solver", Value::Null),
                RunError::Hypothesis(v) => ("hypothesis", json!({ "violations": v })),
            };
            return fail(&dir, &prov, error_value(kind, &e.to_string(), details));
        }
    };

    if let Err(e) = write_artifacts(&dir, &config, &hash, &prov, &outcome) {
        let msg = format!("cannot write results to {}: {e}", dir.display());
        return fail(&dir, &prov, error_value("io", &msg, Value::Null));
    }
    log(&format!("results written to {}", dir.display()));
    if outcome.verdict_failed {
        eprintln!("surfint: verdict failed");
    }
    exit_code(&outcome)
}

pub fn exit_code(outcome: &Outcome) -> i32 {
    if outcome.verdict_failed {
        EXIT_VERDICT
    } else {
        EXIT_OK
    }
}

/// Parses, fills the task from the command line and validates.
pub fn prepare(task: Task, text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = parse_config(text).map_err(ConfigError::Parse)?;
    match config.task {
        None => config.task = Some(task),
        Some(t) if t != task => {
            return Err(ConfigError::Validation(config::ValidationError {
                violations: vec![format!("task: config says {t} but the command line says {task}")],
            }))
        }
        Some(_) => {}
    }
    config.validate().map_err(ConfigError::Validation)?;
    Ok(config)
}

fn write_artifacts(dir: &Path, config: &RunConfig, hash: &str, prov: &Provenance<'_>, o: &Outcome) -> std::io::Result<()> {
    let formats = config.formats();
    if formats.contains(&Format::Csv) {
        if let Some(rows) = &o.spectrum {
            fs::write(dir.join("spectrum.csv"), output::spectrum_csv(hash, rows)?)?;
        }
        if let Some(v) = &o.verdicts {
            fs::write(dir.join("verdicts.csv"), output::verdicts_csv(hash, v)?)?;
        }
        if let Some((param, rows)) = &o.sweep {
            fs::write(dir.join("sweep.csv"), output::sweep_csv(hash, param, rows)?)?;
        }
    }
    if formats.contains(&Format::Json) {
        let status = if o.verdict_failed { Status::VerdictFailed } else { Status::Ok };
        output::write_json(dir, &envelope(prov, status, Some(o.result.clone()), None))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violated_verdict_maps_to_three() {
        let mut o = Outcome {
            spectrum: None,
            verdicts: None,
            sweep: None,
            result: Value::Null,
            verdict_failed: false,
        };
        assert_eq!(exit_code(&o), EXIT_OK);
        o.verdict_failed = true;
        assert_eq!(exit_code(&o), EXIT_VERDICT);
    }

    #[test]
    fn task_mismatch_is_a_violation() {
        let err = prepare(Task::Sphere, r#"{"task":"interval","geometry":{"d":1}}"#).unwrap_err();
        assert!(err.to_string().contains("command line"), "{err}");
    }

    #[test]
    fn task_is_taken_from_the_command_line() {
        let c = prepare(Task::MInfinity, r#"{"coupling":{"alpha":1,"beta":0}}"#).unwrap();
        assert_eq!(c.task(), Task::MInfinity);
    }
}
