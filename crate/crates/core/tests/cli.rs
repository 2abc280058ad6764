use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ifacediv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifacediv"))
        .args(args)
        .env_remove("IFACEDIV_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = ifacediv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_fail(args: &[&str]) -> String {
    let out = ifacediv(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn check_schema(schema_file: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(schema_file);
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn csv_rows(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_ms,reliability"));
    lines
        .map(|l| {
            let (x, f) = l.split_once(',').unwrap();
            (x.parse().unwrap(), f.parse().unwrap())
        })
        .collect()
}

#[test]
fn evaluate_cloning_curve_is_monotone() {
    let rows = csv_rows(&stdout_ok(&[
        "evaluate",
        "--preset",
        "A",
        "--strategy",
        "cloning",
    ]));
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0].0, 0.0);
    assert_eq!(rows[100].0, 1000.0);
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
    assert!(rows.iter().all(|&(_, f)| (0.0..=1.0).contains(&f)));
}

#[test]
fn evaluate_any_of_five_reaches_combined_plateau() {
    let doc = json(&stdout_ok(&[
        "evaluate",
        "--preset",
        "C",
        "--strategy",
        "kofn:1",
        "--format",
        "json",
        "--x-max",
        "3000",
    ]));
    check_schema("curve.schema.json", &doc);
    let want = 1.0 - (1.0f64 - 0.981).powi(2) * (1.0f64 - 0.984).powi(3);
    assert!((doc["plateau"].as_f64().unwrap() - want).abs() < 1e-11);
    let last = doc["points"].as_array().unwrap().last().unwrap()["reliability"]
        .as_f64()
        .unwrap();
    assert!((last - want).abs() < 1e-9);
}

#[test]
fn evaluate_rejects_k_above_interface_count() {
    let err = stderr_fail(&["evaluate", "--preset", "C", "--strategy", "kofn:6"]);
    assert!(err.contains("invalid k=6 for N=5"), "{err}");
}

#[test]
fn evaluate_reports_missing_profile_file() {
    let err = stderr_fail(&[
        "evaluate",
        "--profiles",
        "/nonexistent/profiles.json",
        "--strategy",
        "cloning",
        "--payload-bytes",
        "100",
    ]);
    assert!(err.contains("/nonexistent/profiles.json"), "{err}");
}

#[test]
fn evaluate_reads_profile_file_and_writes_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("p.json");
    fs::write(
        &profiles,
        r#"[{"name":"a","alpha":0.1,"beta":50,"p_succ":0.99},
            {"name":"b","alpha":0.2,"beta":80,"p_succ":0.97,"sigma_ratio":0.2}]"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    stdout_ok(&[
        "evaluate",
        "--profiles",
        profiles.to_str().unwrap(),
        "--strategy",
        "weighted:0.5,0.55",
        "--payload-bytes",
        "1000",
        "--out",
        out.to_str().unwrap(),
        "--x-step",
        "50",
    ]);
    let rows = csv_rows(&fs::read_to_string(out.join("curve.csv")).unwrap());
    assert_eq!(rows.len(), 21);
    assert!(rows.last().unwrap().1 > 0.9);
}

#[test]
fn evaluate_needs_exactly_one_interface_source() {
    stderr_fail(&["evaluate", "--strategy", "cloning", "--payload-bytes", "10"]);
    stderr_fail(&[
        "evaluate",
        "--preset",
        "A",
        "--interfaces",
        "LTE",
        "--strategy",
        "cloning",
    ]);
    stderr_fail(&[
        "evaluate",
        "--interfaces",
        "WIMAX",
        "--strategy",
        "cloning",
        "--payload-bytes",
        "10",
    ]);
}

#[test]
fn optimize_expected_latency_matches_analytic_split() {
    let dir = tempfile::tempdir().unwrap();
    stdout_ok(&[
        "optimize",
        "--preset",
        "A",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let doc = json(&fs::read_to_string(dir.path().join("optimize.json")).unwrap());
    check_schema("optimize.schema.json", &doc);
    assert!(doc.get("runtime_ms").is_none());
    let grid = doc["expected_latency_ms"].as_f64().unwrap();

    let split = json(&stdout_ok(&["split2", "--preset", "A", "--total", "1.05"]));
    check_schema("split2.schema.json", &split);
    let analytic = split["expected_latency_ms"].as_f64().unwrap();
    assert!(
        (grid - analytic).abs() / analytic < 0.02,
        "{grid} vs {analytic}"
    );
}

#[test]
fn optimize_preset_c_beats_every_k_of_five() {
    let doc = json(&stdout_ok(&["optimize", "--preset", "C"]));
    check_schema("optimize.schema.json", &doc);
    let best = doc["reliability_at_targets"][0]["reliability"]
        .as_f64()
        .unwrap();
    for c in doc["comparison"].as_array().unwrap() {
        let f = c["reliability_at_targets"][0]["reliability"]
            .as_f64()
            .unwrap();
        assert!(best > f, "{} reaches {f}", c["strategy"]);
    }
}

#[test]
fn optimize_explicit_targets_and_runtime_flag() {
    let doc = json(&stdout_ok(&[
        "optimize",
        "--interfaces",
        "UMTS,GPRS",
        "--payload-bytes",
        "1500",
        "--targets",
        "300:1,600:2",
        "--delta-gamma",
        "0.1",
        "--report-runtime",
    ]));
    check_schema("optimize.schema.json", &doc);
    assert!(doc["runtime_ms"].as_f64().is_some());
    assert_eq!(doc["targets"].as_array().unwrap().len(), 2);
    let total: f64 = doc["gamma_star"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g.as_f64().unwrap())
        .sum();
    assert!(total >= 1.0 - 1e-9);
    stderr_fail(&[
        "optimize",
        "--interfaces",
        "UMTS",
        "--payload-bytes",
        "1500",
    ]);
}

#[test]
fn split2_is_symmetric_under_swap() {
    let ab = json(&stdout_ok(&[
        "split2",
        "--interfaces",
        "UMTS,GPRS",
        "--payload-bytes",
        "1500",
        "--total",
        "1",
    ]));
    let ba = json(&stdout_ok(&[
        "split2",
        "--interfaces",
        "GPRS,UMTS",
        "--payload-bytes",
        "1500",
        "--total",
        "1",
    ]));
    let g = ab["gamma"].as_f64().unwrap();
    assert!((g + ba["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((g - ab["grid_scan_gamma"].as_f64().unwrap()).abs() <= 0.02);
    assert!(
        (ab["expected_latency_ms"].as_f64().unwrap() - ba["expected_latency_ms"].as_f64().unwrap())
            .abs()
            < 1e-9
    );
}

#[test]
fn split2_identical_profiles_split_evenly() {
    let doc = json(&stdout_ok(&[
        "split2",
        "--interfaces",
        "LTE,LTE",
        "--payload-bytes",
        "800",
        "--total",
        "0.9",
    ]));
    assert!((doc["gamma"].as_f64().unwrap() - 0.45).abs() < 1e-12);
    stderr_fail(&["split2", "--preset", "B"]);
}

fn write_trace(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn playback_writes_report_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_trace(
        dir.path(),
        "wlan.csv",
        "probe,latency_ms\n0,10\n1,\n2,30\n3,12\n",
    );
    let b = write_trace(dir.path(), "lte.csv", "1,20\n2,15\n3,\n4,40\n");
    let out = dir.path().join("out");
    stdout_ok(&[
        "playback",
        "--trace",
        &a,
        "--trace",
        &b,
        "--out",
        out.to_str().unwrap(),
    ]);
    let doc = json(&fs::read_to_string(out.join("report.json")).unwrap());
    check_schema("report.schema.json", &doc);
    assert_eq!(doc["rows"], 3);
    assert_eq!(doc["dropped"], 2);
    assert_eq!(doc["interfaces"], serde_json::json!(["wlan", "lte"]));
    for label in ["cloning", "kofn:1", "kofn:2"] {
        assert!(doc["strategies"][label]["ks"].as_f64().is_some(), "{label}");
    }
    // probes 1..3: (lost,20) (30,15) (12,lost) → any-of-two delivers 20, 15, 12
    let rows = csv_rows(&fs::read_to_string(out.join("kofn_1.playback.csv")).unwrap());
    let want = [(12.0, 1.0 / 3.0), (15.0, 2.0 / 3.0), (20.0, 1.0)];
    assert_eq!(rows.len(), want.len());
    for (got, want) in rows.iter().zip(want) {
        assert_eq!(got.0, want.0);
        assert!((got.1 - want.1).abs() < 1e-11);
    }
    assert!(out.join("kofn_2.predicted.csv").exists());
}

#[test]
fn playback_single_trace_has_zero_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_trace(dir.path(), "only.csv", "0,5\n1,7\n2,\n3,5\n4,9\n");
    let doc = json(&stdout_ok(&[
        "playback",
        "--trace",
        &a,
        "--strategy",
        "kofn:1",
    ]));
    check_schema("report.schema.json", &doc);
    assert_eq!(doc["strategies"]["kofn:1"]["ks"].as_f64().unwrap(), 0.0);
    assert_eq!(
        doc["strategies"]["kofn:1"]["playback"]["plateau"]
            .as_f64()
            .unwrap(),
        0.8
    );
}

#[test]
fn playback_reports_file_and_line_of_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_trace(dir.path(), "bad.csv", "0,5\n1,7\n2,fast\n");
    let err = stderr_fail(&["playback", "--trace", &a]);
    assert!(err.contains("bad.csv:3"), "{err}");
    let err = stderr_fail(&["playback", "--trace", "/nonexistent/trace.csv"]);
    assert!(err.contains("/nonexistent/trace.csv"), "{err}");
}

#[test]
fn mc_check_output_is_valid_and_reproducible() {
    let args = [
        "mc-check",
        "--preset",
        "C",
        "--strategy",
        "kofn:2",
        "--trials",
        "50000",
        "--seed",
        "3",
    ];
    let first = stdout_ok(&args);
    let doc = json(&first);
    check_schema("mc_check.schema.json", &doc);
    let probes = doc["probes"].as_array().unwrap();
    assert_eq!(probes.len(), 20);
    // 3σ flags a few percent of 20-probe runs by chance; 5σ does not
    for p in probes {
        let dev = (p["analytic"].as_f64().unwrap() - p["simulated"].as_f64().unwrap()).abs();
        assert!(dev <= 5.0 / 3.0 * p["bound"].as_f64().unwrap(), "{p}");
    }
    assert_eq!(stdout_ok(&args), first);

    let one = json(&stdout_ok(&[
        "mc-check",
        "--preset",
        "A",
        "--strategy",
        "cloning",
        "--trials",
        "1",
    ]));
    assert_eq!(one["pass"], true);
    stderr_fail(&[
        "mc-check",
        "--preset",
        "A",
        "--strategy",
        "cloning",
        "--trials",
        "0",
    ]);
}

#[test]
fn invalid_thread_setting_is_an_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_ifacediv"))
        .args(["split2", "--preset", "A"])
        .env("IFACEDIV_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
