use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tripsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripsynth"))
        .args(args)
        .output()
        .expect("run tripsynth")
}

fn ok(args: &[&str]) -> String {
    let out = tripsynth(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a corpus into `dir` and returns its config path.
fn corpus(dir: &Path, preset: &str) -> String {
    ok(&["corpus", "--preset", preset, "--out", s(dir)]);
    dir.join("config.toml").to_str().unwrap().to_owned()
}

#[test]
fn full_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "desk");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let summary = ok(&["ingest", "--config", &config, "--out", s(&a)]);
    assert!(summary.starts_with("1000 individuals"), "{summary}");
    ok(&["ingest", "--config", &config, "--out", s(&b)]);
    assert_eq!(fs::read(a.join("store.json")).unwrap(), fs::read(b.join("store.json")).unwrap());

    ok(&["generate", "--config", &config, "--out", s(&a), "--seed", "11"]);
    ok(&["generate", "--config", &config, "--out", s(&b), "--seed", "11", "--threads", "1"]);
    let ga = fs::read(a.join("generated.csv")).unwrap();
    assert_eq!(ga, fs::read(b.join("generated.csv")).unwrap());

    ok(&["validate", "--config", &config, "--out", s(&a)]);
    ok(&["validate", "--config", &config, "--out", s(&b)]);
    let ra = fs::read_to_string(a.join("report.csv")).unwrap();
    assert_eq!(ra, fs::read_to_string(b.join("report.csv")).unwrap());
    assert!(ra.starts_with("metric,type,param,value\n"));

    ok(&["generate", "--config", &config, "--out", s(&b), "--seed", "12"]);
    assert_ne!(ga, fs::read(b.join("generated.csv")).unwrap());
}

#[test]
fn ingest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    ok(&["ingest", "--config", &config]);
    let first = fs::read(dir.path().join("out/store.json")).unwrap();
    ok(&["ingest", "--config", &config]);
    assert_eq!(first, fs::read(dir.path().join("out/store.json")).unwrap());
    assert!(first.starts_with(b"tripsynth-store v1\n"));
}

#[test]
fn missing_zones_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    let zones = dir.path().join("zones.csv");
    fs::remove_file(&zones).unwrap();
    let out = tripsynth(&["ingest", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(s(&zones)), "{err}");
}

#[test]
fn zero_day_horizon_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    let text = fs::read_to_string(&config).unwrap() + "days = 0\n";
    fs::write(&config, text).unwrap();
    ok(&["ingest", "--config", &config]);
    ok(&["generate", "--config", &config]);
    let csv = fs::read_to_string(dir.path().join("out/generated.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "{csv}");
    assert!(csv.starts_with("traveller_ID,"), "{csv}");
}

#[test]
fn reference_against_itself_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    let trips = dir.path().join("trips.csv");
    ok(&["validate", "--config", &config, "--generated", s(&trips)]);
    let report = fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    let mut checked = 0;
    for line in report.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let value: f64 = match f[3].parse() {
            Ok(v) => v,
            Err(_) => continue,
        };
        if f[0].starts_with("js_") || f[0].ends_with("_js") {
            assert_eq!(value, 0.0, "{line}");
            checked += 1;
        }
        if f[0].ends_with("_overlap") {
            assert_eq!(value, 1.0, "{line}");
            checked += 1;
        }
    }
    assert!(checked > 10, "{report}");
}

#[test]
fn broken_weight_ordering_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    ok(&["ingest", "--config", &config]);
    let text = fs::read_to_string(&config).unwrap() + "kappa = 0.1\n";
    fs::write(&config, text).unwrap();
    let out = tripsynth(&["generate", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out/generated.csv").exists());
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    let text = fs::read_to_string(&config).unwrap() + "sede = 3\n";
    fs::write(&config, text).unwrap();
    let out = tripsynth(&["ingest", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sede"));
}

#[test]
fn generate_without_store_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = corpus(dir.path(), "degenerate");
    let out = tripsynth(&["generate", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("run `tripsynth ingest` first"));
}
