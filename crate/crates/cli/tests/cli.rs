use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracpk")).args(args).env_remove("FRACPK_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn counterexample_accepts_valid_config() {
    let o = run(&["counterexample", "--s", "0.25", "--beta", "3", "--A", "3", "--k", "8,16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# fracpk counterexample schema_version=1"));
    assert_eq!(lines[1], "k,k0,seminorm,area,quotient,step4_bound");
    assert_eq!(lines.len(), 4);
}

#[test]
fn regime_violation_exits_2() {
    let o = run(&["counterexample", "--s", "0.6", "--beta", "3", "--A", "3", "--k", "8,16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s < 1/2"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_domain_exits_2() {
    let o = run(&["seminorm", "--domain", "missing.json", "--s", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.json"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["eigen", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["counterexample", "--s", "1.5", "--k", "8"]).status.code(), Some(2));
    assert_eq!(run(&["asymptotics", "--s", "0.25", "--ells", "2", "--omega", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["check", "--domain", &fixture("unit_square.json"), "--condition", "density", "--s", "0.25"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["counterexample", "--s", "0.25", "--k", "8", "--threads", "0"]).status.code(), Some(2));
}

#[test]
fn divergent_seminorm_exits_1() {
    let o = run(&["seminorm", "--domain", &fixture("unit_square.json"), "--s", "0.75"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn verify_kernels_is_reproducible() {
    let a = run(&["verify-kernels", "--s", "0.25", "--seed", "42"]);
    let b = run(&["verify-kernels", "--s", "0.25", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["orders"][0]["checks"].as_array().unwrap().len(), 40);
    let c = run(&["verify-kernels", "--s", "0.25", "--seed", "7"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn asymptotics_row_count() {
    let o = run(&["asymptotics", "--s", "0.25", "--omega", "0,1", "--ells", "2,4,8", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("ell,k,lambda,p2_omega,gap,fitted_exponent"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn out_csv_selects_format() {
    let a = run(&["asymptotics", "--s", "0.25", "--ells", "2,4", "--k", "1", "--out", "csv"]);
    let b = run(&["asymptotics", "--s", "0.25", "--ells", "2,4", "--k", "1", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    let j = run(&["asymptotics", "--s", "0.25", "--ells", "2,4", "--k", "1", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn out_file_matches_stdout_and_domain_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let dom = fixture("two_boxes.json");
    let before = std::fs::read(&dom).unwrap();
    let args = ["seminorm", "--domain", dom.as_str(), "--s", "0.25"];
    let a = run(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    let b = run(&with_out);
    assert_eq!(b.status.code(), Some(0));
    assert!(b.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
    assert_eq!(std::fs::read(&dom).unwrap(), before);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let r = &v["result"];
    for key in ["perimeter_terms", "cross_terms", "total", "quotient"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert_eq!(r["total"]["method"], "adaptive_quadrature");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"s": 0.25, "beta": 3, "A": 3, "k": [8, 16, 32]}"#).unwrap();
    let a = run(&["--config", cfg.to_str().unwrap(), "counterexample"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a).lines().count(), 5);
    let b = run(&["counterexample", "--config", cfg.to_str().unwrap(), "--k", "8"]);
    assert_eq!(stdout(&b).lines().count(), 3);
    std::fs::write(&cfg, r#"{"s": 0.25, "k": [8], "unknown_key": 1}"#).unwrap();
    assert_eq!(run(&["counterexample", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn check_reports_verdicts() {
    let o = run(&[
        "check",
        "--domain",
        &fixture("counterexample_k16.json"),
        "--condition",
        "ls",
        "--s",
        "0.75",
        "--directions",
        "arc:0.0997:0.1974:9",
        "--window=-20,20,-4,4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "holds");
    let o = run(&[
        "check",
        "--domain",
        &fixture("counterexample_k16.json"),
        "--condition",
        "ls",
        "--s",
        "0.25",
        "--directions",
        "arc:0.1:0.2:9",
        "--window=-20,20,-4,4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s > 1/2"));
}

#[test]
fn constants_carry_provenance() {
    let o = run(&["constants"]);
    assert_eq!(o.status.code(), Some(0));
    let shipped: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let hash = shipped["recipe_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("constants.json");
    let r = run(&["constants", "--regenerate", "--orders", "0.25,0.75", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let fresh: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(fresh["recipe_hash"].as_str(), Some(hash.as_str()));
    assert_eq!(fresh["tolerances"], shipped["tolerances"]);
    let entries = fresh["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries[0]["p1_unit"].is_null());
    assert!(entries[1]["p1_unit"].as_f64().unwrap() > 0.0);
    let stored = shipped["entries"].as_array().unwrap().iter().find(|e| e["s"] == 0.75).unwrap();
    assert_eq!(stored["lambda_ref"], entries[1]["lambda_ref"]);
}

#[test]
fn eigen_csv_and_json_agree() {
    let dom = fixture("interval_union.json");
    let args = [
        "eigen",
        "--domain",
        dom.as_str(),
        "--s",
        "0.75",
        "--grid",
        "32",
        "--elements",
        "p1",
        "--mode",
        "regional",
        "--k",
        "3",
    ];
    let csv = run(&[&args[..], &["--format", "csv"]].concat());
    let json = run(&args);
    assert_eq!(csv.status.code(), Some(0), "{}", stderr(&csv));
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let text = stdout(&csv);
    let first: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v["result"]["eigenvalues"][0].as_f64().unwrap(), first);
    assert_eq!(v["result"]["form_mode"], "regional");
}
