//! End-to-end checks of the command-line surface: fixture generation, file
//! ingestion, report emission, exit codes, and byte-stable pipeline output.

use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chordarc")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn tmpdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("tempdir")
}

#[test]
fn generate_and_ingest_roundtrip() {
    let dir = tmpdir();
    let csv = dir.path().join("disk.csv");
    let out = run(&[
        "generate",
        "--spec",
        r#"{"kind":"flat-disk","rings":12,"spacing":0.1}"#,
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"kind\": \"flat-disk\""));

    let summary = dir.path().join("summary.json");
    let out = run(&["ingest", "--input", csv.to_str().unwrap(), "--out", summary.to_str().unwrap()]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert!(parsed["points"].as_u64().unwrap() > 400);
    assert_eq!(parsed["has_chart"], true);
}

#[test]
fn matrix_generation_for_custom_metrics() {
    let dir = tmpdir();
    let mat = dir.path().join("snow.txt");
    let out = run(&[
        "generate",
        "--spec",
        r#"{"kind":"snowflake","alpha":0.5,"n":64}"#,
        "--out",
        mat.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["ingest", "--input", mat.to_str().unwrap()]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed["points"], 64);
}

#[test]
fn invariants_report() {
    let out = run(&[
        "invariants",
        "--fixture",
        r#"{"kind":"grid","nx":30,"ny":30,"spacing":0.035}"#,
        "--window",
        "0.1:0.26",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let q = parsed["regularity"]["q_hat"].as_f64().unwrap();
    assert!((1.5..=2.5).contains(&q), "Q = {q}");
}

#[test]
fn quasicircle_report_and_svg() {
    let dir = tmpdir();
    let report = dir.path().join("loop.json");
    let svg = dir.path().join("loop.svg");
    let out = run(&[
        "quasicircle",
        "--fixture",
        r#"{"kind":"flat-disk","rings":20,"spacing":0.05}"#,
        "--center",
        "0",
        "--scale",
        "0.35",
        "--guard-off",
        "--out",
        report.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    // Exit code 2: the waived guard is recorded as a diagnostic.
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let lambda = parsed["outcome"]["certificate"]["lambda"].as_f64().unwrap();
    assert!((1.0..=2.0).contains(&lambda), "lambda = {lambda}");
    let winding = parsed["outcome"]["minimize"]["winding"].as_i64().unwrap();
    assert_eq!(winding.abs(), 1);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.matches("<path").count() == 1);
}

#[test]
fn guard_refusal_is_an_error() {
    let out = run(&[
        "quasicircle",
        "--fixture",
        r#"{"kind":"flat-disk","rings":16,"spacing":0.0625}"#,
        "--center",
        "0",
        "--scale",
        "0.35",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn pipeline_golden_bytes_across_runs() {
    let dir = tmpdir();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = run(&[
            "pipeline",
            "--fixture",
            r#"{"kind":"flat-disk","rings":16,"spacing":0.0625}"#,
            "--center",
            "0",
            "--scale",
            "0.3",
            "--guard-off",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "golden reports differ");
    assert!(bytes_a.len() > 1000);
}

#[test]
fn pipeline_toml_config() {
    let dir = tmpdir();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "center = 0\nscale_r = 0.3\nguard_off = true\nseed = 3\nquasiconvex_pairs = 2\n",
    )
    .unwrap();
    let out = run(&[
        "pipeline",
        "--fixture",
        r#"{"kind":"flat-disk","rings":14,"spacing":0.0714}"#,
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed["config"]["seed"], 3);
}

#[test]
fn missing_input_is_an_error() {
    let out = run(&["ingest", "--input", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn render_counts_elements() {
    let dir = tmpdir();
    let svg = dir.path().join("pts.svg");
    let out = run(&[
        "render",
        "--fixture",
        r#"{"kind":"circle-loop","n":24,"radius":1.0}"#,
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 24);
}
