use std::path::Path;
use std::process::Command;

use contact_sphere_cli::pipeline::Verdict;
use contact_sphere_cli::{run_suite, ExperimentConfig, Suite};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contact-exp"))
}

fn write_config(dir: &Path, json: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path
}

#[test]
fn first_iterate_reports_translated_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"iterate_schedule": [1], "grid": 20000, "starts": 16}"#);
    let out = dir.path().join("out");
    let status = exe()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["conclusion"]["min_total"].as_f64().unwrap() <= 1e-6);
    assert_eq!(report["conclusion"]["verdict"], "translated_point_found");
    for name in ["decay.csv", "defect.csv", "zeroset_1.csv", "timings.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let decay = std::fs::read_to_string(out.join("decay.csv")).unwrap();
    assert!(decay.starts_with("n,sup_dist_sigma_to_p,sup_dist_image_to_q,sample_size\n"));
    let zeros = std::fs::read_to_string(out.join("zeroset_1.csv")).unwrap();
    assert!(zeros.starts_with("re1,im1,re2,im2,residual\n"));
    assert!(zeros.lines().count() > 10);
}

#[test]
fn later_iterate_is_evidence_of_no_translated_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"iterate_schedule": [1, 24], "grid": 20000, "starts": 16}"#);
    let status = exe()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let defect = std::fs::read_to_string(dir.path().join("out/defect.csv")).unwrap();
    assert!(defect.starts_with("n,min_total,g_component,fiber_component,starts\n"));
    assert_eq!(defect.lines().count(), 3);
}

#[test]
fn small_fibre_separation_aborts_at_conjugator() {
    let dir = tempfile::tempdir().unwrap();
    let out = exe()
        .args(["run", "--b", "0.95", "--grid", "2000", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conjugator"));
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"gird": 5000}"#);
    let out = exe().args(["verify", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gird"));
}

#[test]
fn invalid_flags_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [["--a", "1.5"], ["--n", "1"], ["--grid", "10"]] {
        let out = exe().arg("verify").args(args).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn auxiliary_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["circle", "hamiltonian", "verify", "spectrum"] {
        let status = exe().arg(cmd).arg("--out").arg(dir.path()).status().unwrap();
        assert_eq!(status.code(), Some(0), "{cmd}");
    }
}

#[test]
fn suites_run_only_their_stages() {
    let config = ExperimentConfig {
        grid: 5_000,
        iterate_schedule: vec![2],
        ..ExperimentConfig::default()
    };
    let verify = run_suite(Suite::Verify, &config).unwrap();
    let v = verify.verification.as_ref().unwrap();
    assert!(v.passed);
    assert!(v.entries.iter().all(|e| e.max_residual <= 1e-9));
    assert!(verify.decay.is_none() && verify.defects.is_empty() && verify.conclusion.is_none());

    let circle = run_suite(Suite::Circle, &config).unwrap();
    let c = circle.circle.as_ref().unwrap();
    assert_eq!(c.maps_with_two_zeros, 100);
    assert!(circle.conjugator.is_none());

    let ham = run_suite(Suite::Hamiltonian, &config).unwrap();
    assert!(ham.hamiltonian.as_ref().unwrap().passed);

    let certify = run_suite(Suite::Certify, &config).unwrap();
    assert_eq!(certify.certificates.len(), 1);
    assert!(!certify.certificates[0].holds);
    assert_eq!(certify.zero_sets.len(), 1);

    let run = run_suite(Suite::Run, &config).unwrap();
    assert_eq!(run.conclusion.as_ref().unwrap().verdict, Verdict::TranslatedPointFound);
    assert!(run.circle.is_none());
}

#[test]
fn suite_names_parse() {
    for name in ["verify", "spectrum", "decay", "search", "certify", "circle", "hamiltonian", "run", "all"] {
        assert!(name.parse::<Suite>().is_ok());
    }
    assert!("plot".parse::<Suite>().is_err());
}
