use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slotbragg")).args(args).env_remove("SLOTBRAGG_JOBS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Ten periods keep the physics cheap.
fn write_config(dir: &Path, extra: &str) -> String {
    let geometry = serde_json::to_string(&slotbragg::photonics::CavityGeometry::baseline_801(20.0, 10)).unwrap();
    let path = dir.join("run.json");
    std::fs::write(&path, format!(r#"{{"geometry": {geometry}, "hidden_layers": [8] {extra}}}"#)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn indist_prints_json_with_provenance() {
    let v = stdout_json(&run(&["indist", "--g", "1000", "--kappa", "1000", "--gstar", "0"]));
    assert!((v["result"]["indist"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(v["provenance"]["tool"], "slotbragg");
    assert_eq!(v["provenance"]["config"]["kappa"], 1000.0);
}

#[test]
fn invalid_rates_and_flags_exit_with_two() {
    let o = run(&["indist", "--g", "0", "--kappa", "1", "--gstar", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("g_over_gamma"));
    assert_eq!(code(&run(&["indist", "--g", "1"])), 2);
    assert_eq!(code(&run(&["indist", "--g", "1", "--kappa", "1", "--gstar", "1", "--method", "magic"])), 2);
}

#[test]
fn unreachable_targets_give_an_empty_region() {
    let v = stdout_json(&run(&["threshold", "--gstar", "1e4", "--target", "0.99", "--g-range", "1:10", "--kappa-range", "1:10"]));
    assert_eq!(v["threshold"]["region"], "empty");
    let o = run(&["map", "--gstar", "1e4", "--g-range", "1:10", "--kappa-range", "1:10", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# region: empty"));
    assert!(text.contains("\ng_over_gamma,kappa_over_gamma,indist\n"));
}

#[test]
fn map_writes_csv_and_prints_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let v = stdout_json(&run(&["map", "--gstar", "100", "--g-range", "10:1e5", "--kappa-range", "10:1e6", "--n", "12", "--out", out.to_str().unwrap()]));
    assert_eq!(v["summary"]["region"], "found");
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 144);
    assert!(!csv.contains('\r'));
}

#[test]
fn dataset_bytes_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let gen = |jobs: &str| {
        let out = dir.path().join(format!("d{jobs}.csv"));
        let o = run(&["dataset-gen", "--config", &cfg, "--n", "100", "--seed", "7", "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = gen("1");
    assert_eq!(a, gen("8"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# tool: slotbragg "));
    assert!(text.contains("# seed: 7\n") && text.contains("# config_sha256: "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 101);
}

#[test]
fn degenerate_bounds_warn() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#", "ga": {"bounds": [50.0, 50.0]}"#);
    let o = run(&["dataset-gen", "--config", &cfg, "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("variance"));
}

#[test]
fn config_and_io_failures_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["cavity-eval", "--config", "/nonexistent/run.json"])), 4);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"sede": 1}"#).unwrap();
    let o = run(&["cavity-eval", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sede"));
    let cfg = write_config(dir.path(), "");
    assert_eq!(code(&run(&["dataset-gen", "--config", &cfg, "--n", "2", "--out", "/nonexistent/dir/d.csv"])), 4);
    assert_eq!(code(&run(&["surrogate-eval", "--model", "/nonexistent.json", "--dataset", "/nonexistent.csv"])), 4);
}

#[test]
fn physics_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let flat = r#", "calibrate": false, "index_model": {"n_slot_mode": 1.7, "slope_per_nm": 0.0, "w_ref_nm": 0.0, "veff_area_nm2": 20.0, "veff_slot_decay_nm": 15.0, "q_loss": null}"#;
    let cfg = write_config(dir.path(), flat);
    let o = run(&["cavity-eval", "--config", &cfg]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resonance"));
}

#[test]
fn verify_on_the_baseline_equals_cavity_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let a = stdout_json(&run(&["cavity-eval", "--config", &cfg]));
    let widths = vec!["50"; 10].join(",");
    let b = stdout_json(&run(&["verify", "--config", &cfg, "--widths", &widths]));
    assert_eq!(a["evaluation"], b["evaluation"]);
    assert_eq!(code(&run(&["verify", "--config", &cfg, "--widths", "50,50"])), 2);
}

#[test]
fn sweep_emits_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = run(&["sweep", "--config", &cfg, "--param", "slot_width_nm", "--from", "10", "--to", "50", "--steps", "5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "param,value,indist,q,veff_norm,g_over_gamma,kappa_over_gamma");
    assert_eq!(body.len(), 6);
    assert_eq!(code(&run(&["sweep", "--config", &cfg, "--param", "colour", "--from", "1", "--to", "2"])), 2);
}

#[test]
fn train_evaluate_and_optimize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#", "train": {"epochs": 30}, "ga": {"population_size": 12, "generations": 5}, "top_k": 2"#,
    );
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    assert_eq!(code(&run(&["dataset-gen", "--config", &cfg, "--n", "40", "--out", &p("d.csv")])), 0);
    let t = stdout_json(&run(&["train", "--config", &cfg, "--dataset", &p("d.csv"), "--model", &p("m.json"), "--history", &p("h.csv")]));
    // Failed rows are carried as nan and dropped before training.
    let rows = t["training"]["rows"].as_u64().unwrap();
    assert!((20..=40).contains(&rows), "{rows}");
    let model: Value = serde_json::from_str(&std::fs::read_to_string(p("m.json")).unwrap()).unwrap();
    assert_eq!(model["version"], 1);
    assert!(model["provenance"]["config_sha256"].is_string());
    assert!(std::fs::read_to_string(p("h.csv")).unwrap().contains("\nepoch,train_loss,holdout_loss\n"));

    let e = stdout_json(&run(&["surrogate-eval", "--model", &p("m.json"), "--dataset", &p("d.csv")]));
    assert!(e["metrics"]["rmse"].as_f64().unwrap() < 0.5);

    let opt = |report: &str| {
        stdout_json(&run(&["optimize", "--config", &cfg, "--model", &p("m.json"), "--report", &p(report), "--history", &p("gh.csv")]))
    };
    let s = opt("r1.json");
    assert_eq!(s["summary"]["physics_evaluations"], 3);
    opt("r2.json");
    assert_eq!(std::fs::read(p("r1.json")).unwrap(), std::fs::read(p("r2.json")).unwrap());
    assert!(std::fs::read_to_string(p("gh.csv")).unwrap().contains("\ngeneration,best,mean\n"));
}
