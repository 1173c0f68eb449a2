use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic/run.conf")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicnet"))
        .args(args)
        .arg("--config")
        .arg(config())
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn stepwise_matches_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let whole = tmp.path().join("whole");
    let steps = tmp.path().join("steps");
    assert!(run(&["pipeline"], &whole).status.success());
    for stage in ["preprocess", "fit", "networks", "metrics", "dynamics"] {
        let o = run(&[stage], &steps);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for name in files(&steps) {
        assert!(!name.ends_with(".partial"), "{name} left staged");
        let a = fs::read(whole.join(&name)).unwrap();
        let b = fs::read(steps.join(&name)).unwrap();
        assert!(a == b, "{name} differs between stepwise and pipeline runs");
    }
    assert!(whole.join("run_report.json").exists());
}

#[test]
fn model_dump_has_headers() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&["pipeline"], tmp.path()).status.success());
    let w = fs::read_to_string(tmp.path().join("W.csv")).unwrap();
    assert_eq!(w.lines().next().unwrap(), "doc_id,topic_0,topic_1,topic_2,topic_3");
    assert_eq!(w.lines().count(), 73);
    let h = fs::read_to_string(tmp.path().join("H.csv")).unwrap();
    assert_eq!(h.lines().count(), 5);
    assert!(h.starts_with("topic_id,"));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("model_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["k"], 4);
    assert_eq!(summary["excluded_topics"], serde_json::json!([0]));
    assert!(summary["iterations"].as_u64().unwrap() > 0);
    assert!(summary["zero_proportion_docs"].is_array());
}

#[test]
fn run_report_names_tau() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&["pipeline"], tmp.path()).status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("run_report.json")).unwrap()).unwrap();
    let notes = report["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("tau = 0.05")), "{notes:?}");
    assert_eq!(report["parameters"]["k"], 4);
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(&["pipeline", "--tau", "0.1"], tmp.path()).status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("metrics_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["tau"], 0.1);
}

#[test]
fn missing_label_map_fails_in_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["pipeline", "--labels", "/nonexistent/labels.tsv"], tmp.path());
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stage fit"), "{err}");
    assert!(err.contains("/nonexistent/labels.tsv"), "{err}");
    let names = files(tmp.path());
    assert!(!names.is_empty());
    assert!(names.iter().all(|n| n.ends_with(".partial")), "{names:?}");
}

#[test]
fn stage_without_inputs_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["metrics"], tmp.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage metrics"));
}

#[test]
fn bad_parameter_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["pipeline", "-k", "zero"], tmp.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains('k'));
}
