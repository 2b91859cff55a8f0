use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use surfint_cli::REPORT_SCHEMA;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surfint"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(task: &str, config: &Path, out: &Path, threads: Option<&str>) -> i32 {
    let mut cmd = bin();
    cmd.arg(task).arg("--config").arg(config).arg("--out").arg(out);
    if let Some(t) = threads {
        cmd.env("SURFINT_THREADS", t);
    }
    cmd.output().expect("binary runs").status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

/// Data rows of a CSV written by the CLI, skipping the hash line and header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    let body: String = lines.map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn assert_schema_valid(doc: &Value) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn interval_example_has_one_row_near_minus_one() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("interval", &configs().join("interval.json"), out.path(), None), 0);
    let r = rows(&out.path().join("spectrum.csv"));
    assert_eq!(r.len(), 1);
    let lam: f64 = r[0][1].parse().unwrap();
    assert!((lam + 1.0).abs() < 1e-8, "{lam}");
    let k: f64 = r[0][2].parse().unwrap();
    assert!((k * k + lam).abs() < 1e-14);
    assert_schema_valid(&report(out.path()));
}

#[test]
fn compare_case_passes() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("compare", &configs().join("compare-case.json"), out.path(), None), 0);
    let doc = report(out.path());
    assert_schema_valid(&doc);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["result"]["verdicts"][0]["ordering_ok"], true);
    assert_eq!(doc["result"]["verdicts"][0]["case_id"], "delta-mixed");
}

#[test]
fn sphere_sweep_count_switches_after_one() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("sweep", &configs().join("sweep-sphere.json"), out.path(), None), 0);
    let text = fs::read_to_string(out.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "alpha_R,lambda_1,N,m_A");
    for r in rows(&out.path().join("sweep.csv")) {
        let x: f64 = r[0].parse().unwrap();
        let n: usize = r[2].parse().unwrap();
        assert_eq!(n, usize::from(x > 1.0), "alpha_R = {x}");
    }
    assert_schema_valid(&report(out.path()));
}

#[test]
fn csv_output_is_bit_identical_across_runs_and_thread_counts() {
    let cases = [("sweep", "sweep-sphere.json", "sweep.csv"), ("compare", "compare-suite.json", "verdicts.csv"), ("circle-fem", "circle-fem.json", "spectrum.csv")];
    for (task, config, file) in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(run(task, &configs().join(config), a.path(), Some("1")), 0);
        assert_eq!(run(task, &configs().join(config), b.path(), Some("4")), 0);
        let fa = fs::read(a.path().join(file)).unwrap();
        let fb = fs::read(b.path().join(file)).unwrap();
        assert_eq!(fa, fb, "{task}");
    }
}

#[test]
fn every_shipped_config_runs_and_reports_valid_json() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let task = doc["task"].as_str().unwrap().to_string();
        let out = tempfile::tempdir().unwrap();
        assert_eq!(run(&task, &path, out.path(), None), 0, "{}", path.display());
        let rep = report(out.path());
        assert_schema_valid(&rep);
        let hash = rep["provenance"]["config_hash"].as_str().unwrap().to_string();
        for f in ["spectrum.csv", "verdicts.csv", "sweep.csv"] {
            if let Ok(text) = fs::read_to_string(out.path().join(f)) {
                assert!(text.starts_with(&format!("# config_hash={hash} ")), "{f}");
            }
        }
    }
}

#[test]
fn invalid_config_exits_two_with_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"task":"interval","coupling":{"alpha":2,"beta":0,"gamma":[0,0]},"geometry":{}}"#);
    let out = dir.path().join("out");
    assert_eq!(run("interval", &cfg, &out, None), 2);
    let doc = report(&out);
    assert_schema_valid(&doc);
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["error"]["kind"], "validation");
    let violations = doc["error"]["details"]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v.as_str().unwrap().contains("geometry.d")));
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\"task\":\"interval\",\n\"coupling\":{\"alpha\":2,\"beta\":0,\"gamma\":1}}");
    let out = dir.path().join("out");
    assert_eq!(run("interval", &cfg, &out, None), 2);
    let doc = report(&out);
    assert_schema_valid(&doc);
    assert_eq!(doc["error"]["kind"], "parse");
    assert_eq!(doc["error"]["details"]["line"], 2);
}

#[test]
fn solver_failure_exits_two() {
    // Two roots are predicted; a two-cell scan without refinement cannot separate them.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"task":"interval","coupling":{"alpha":1,"beta":1,"gamma":[0,0]},"geometry":{"d":1},
            "solver":{"grid":2,"max_refinements":0}}"#,
    );
    let out = dir.path().join("out");
    let code = run("interval", &cfg, &out, None);
    let doc = report(&out);
    assert_schema_valid(&doc);
    assert_eq!(code, 2, "{doc}");
    assert_eq!(doc["error"]["kind"], "solver");
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run("interval", &dir.path().join("nope.json"), &out, None), 2);
    assert_eq!(report(&out)["error"]["kind"], "io");
}
