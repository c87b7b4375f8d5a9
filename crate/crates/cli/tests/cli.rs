//! End-to-end tests of the `modmax` binary: exit codes, report schema,
//! determinism of the emitted tables, and config validation.

use std::path::Path;
use std::process::{Command, Output};

fn modmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modmax"))
        .args(args)
        .output()
        .expect("spawn modmax")
}

fn read_report(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("report.json")).expect("report.json");
    serde_json::from_str(&text).expect("report parses")
}

#[test]
fn default_gauss_vanishing_passes() {
    let tmp = tempfile::TempDir::new().unwrap();
    let out = modmax(&["gauss-vanishing", "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = read_report(tmp.path());
    assert_eq!(report["experiment"], "gauss-vanishing");
    assert_eq!(report["passed"], true);
    assert_eq!(report["vacuous"], false);
    assert!(report["version"].as_str().is_some_and(|v| !v.is_empty()));
    assert_eq!(report["config"]["q_max"], 64);

    let csv = report["tables"][0]["csv"].as_str().unwrap();
    let table = std::fs::read_to_string(tmp.path().join(csv)).unwrap();
    assert!(table.starts_with("# complete-sum"), "{table}");
    assert!(table.contains("param,raw,normalized"), "{table}");
}

#[test]
fn same_config_and_seed_reproduces_byte_identical_outputs() {
    let a = tempfile::TempDir::new().unwrap();
    let b = tempfile::TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = modmax(&["weyl-decay", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success());
    }
    let report = read_report(a.path());
    for key in ["csv", "svg"] {
        let name = report["tables"][0][key].as_str().unwrap();
        let left = std::fs::read(a.path().join(name)).unwrap();
        let right = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between identical runs");
    }
}

#[test]
fn unknown_param_key_is_rejected() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "experiment = \"gauss-vanishing\"\n\n[params]\ntolernace = 1.0\n")
        .unwrap();
    let out = modmax(&[
        "gauss-vanishing",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown field `tolernace`"), "{stderr}");
}

#[test]
fn experiment_id_mismatch_is_rejected() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("other.toml");
    std::fs::write(&cfg, "experiment = \"weyl-decay\"\n").unwrap();
    let out = modmax(&[
        "gauss-vanishing",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("weyl-decay"), "{stderr}");
}

#[test]
fn empty_sweep_is_a_flagged_vacuous_pass() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("empty.toml");
    std::fs::write(&cfg, "experiment = \"error-decay\"\n\n[params]\nlambdas = []\n").unwrap();
    let out = modmax(&[
        "error-decay",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pass-vacuous"), "{stdout}");

    let report = read_report(tmp.path());
    assert_eq!(report["vacuous"], true);
    assert_eq!(report["passed"], true);
    assert_eq!(report["assertions"].as_array().unwrap().len(), 0);
}

#[test]
fn failed_assertion_exits_one() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("strict.toml");
    std::fs::write(
        &cfg,
        "experiment = \"gauss-vanishing\"\n\n[params]\nq_max = 16\ntolerance = 1e-30\n",
    )
    .unwrap();
    let out = modmax(&[
        "gauss-vanishing",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = read_report(tmp.path());
    assert_eq!(report["passed"], false);
    assert_eq!(report["vacuous"], false);
}

#[test]
fn exceptional_set_export_truncates_but_reports_full_cardinality() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("scan.toml");
    std::fs::write(
        &cfg,
        "experiment = \"ttstar-scan\"\n\n[params]\nj_min = 4\nj_max = 4\nmax_members = 100\n",
    )
    .unwrap();
    let out = modmax(&[
        "ttstar-scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(tmp.path().join("exceptional-set-j4.json")).unwrap();
    let set: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(set["members"].as_array().unwrap().len(), 100);
    assert_eq!(set["cardinality"], 5747);
}

#[test]
fn seed_override_is_recorded_in_the_report() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("fact.toml");
    std::fs::write(
        &cfg,
        "experiment = \"factorization\"\n\n[params]\nsamples = 50\ns_values = [2]\n",
    )
    .unwrap();
    let out = modmax(&[
        "factorization",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = read_report(tmp.path());
    assert_eq!(report["seed_override"], 7);
    assert_eq!(report["config"]["seed"], 7);
}

#[test]
fn carleson_report_carries_truncation_tail_bound() {
    let tmp = tempfile::TempDir::new().unwrap();
    let cfg = tmp.path().join("norm.toml");
    std::fs::write(
        &cfg,
        "experiment = \"carleson-norm\"\n\n[params]\nsizes = [16, 32]\ntrials = 2\n",
    )
    .unwrap();
    let out = modmax(&[
        "carleson-norm",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_report(tmp.path());
    let bound = report["extras"]["truncation_tail_l1_bound"].as_f64().unwrap();
    assert!(bound > 0.0 && bound.is_finite());
}
