use std::path::Path;
use std::process::{Command, Output};

fn ricci_lab(args: &[&str], cwd: &Path, tol: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ricci-lab"));
    cmd.args(args).current_dir(cwd).env_remove("RICCI_LAB_TOL");
    if let Some(t) = tol {
        cmd.env("RICCI_LAB_TOL", t);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_example_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = ricci_lab(&["verify-example", "schwarzschild_exterior"], d.path(), None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_json(&d.path().join("verify_schwarzschild_exterior.json"));
    assert!(r["s_max_abs"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(r["tolerance"].as_f64(), Some(1e-10));

    write(
        d.path(),
        "horizon.json",
        r#"{"example": {"m": 1, "grid": {"lo": 2, "hi": 10, "count": 64}}}"#,
    );
    let o = ricci_lab(
        &["verify-example", "schwarzschild_exterior", "--config", "horizon.json"],
        d.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(2));

    let o = ricci_lab(
        &["verify-example", "schwarzschild_interior", "--out", "rep"],
        d.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&d.path().join("rep/verify_schwarzschild_interior.json"));
    for p in r["points"].as_array().unwrap().iter().filter(|p| p["quantity"] == "s") {
        assert!((p["value"].as_f64().unwrap() - 1.5).abs() <= 1e-10);
    }

    let o = ricci_lab(&["verify-example", "sphere_family"], d.path(), Some("1e-300"));
    assert_eq!(o.status.code(), Some(1));
    let o = ricci_lab(&["verify-example", "sphere_family"], d.path(), Some("nonsense"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_configs_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for (i, text) in ["{", "[]", r#"{"integrate": {"n": "three"}}"#, r#"{"unknown": 1}"#, ""]
        .iter()
        .enumerate()
    {
        let name = format!("bad{i}.json");
        write(d.path(), &name, text);
        for cmd in ["identities", "integrate", "sweep"] {
            let o = ricci_lab(&[cmd, "--config", &name, "--out", "o"], d.path(), None);
            assert_eq!(o.status.code(), Some(2), "{cmd} {text}");
        }
    }
    let o = ricci_lab(&["integrate", "--config", "missing.json", "--out", "o"], d.path(), None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identities_skip_is_not_failure() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.json",
        r#"{"identities": {"structure": {"example": {"name": "schwarzschild_interior", "m": 1, "R3": 8}},
            "suite": ["eigenstructure"]}}"#,
    );
    let o = ricci_lab(&["identities", "--config", "c.json"], d.path(), None);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&d.path().join("identity_eigenstructure.json"));
    assert_eq!(r["status"], "SKIP");
    assert!(r["reason"].is_string());
    let s = read_json(&d.path().join("summary.json"));
    assert_eq!(s["config_hash"], r["config_hash"]);
}

#[test]
fn integrate_outputs_and_bad_initial_data() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "sphere.json",
        r#"{"integrate": {"n": 3, "h": 2, "t_span": 1, "dt": 0.001, "family": {"family": "sphere", "lambda": 2}}}"#,
    );
    let o = ricci_lab(
        &["integrate", "--config", "sphere.json", "--out", "out"],
        d.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("label: SPHERE_LIKE"));
    let csv = std::fs::read_to_string(d.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1002);
    assert!(d.path().join("out/events.json").exists());
    let c = read_json(&d.path().join("out/classification.json"));
    assert_eq!(c["classification"]["label"], "SPHERE_LIKE");

    write(
        d.path(),
        "bad.json",
        r#"{"integrate": {"n": 3, "h": 1, "a0": 5, "kappa": 0, "b0": 1, "t_span": 1}}"#,
    );
    let o = ricci_lab(&["integrate", "--config", "bad.json", "--out", "out2"], d.path(), None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_and_handles_empty_lists() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "s.json",
        r#"{"sweep": {"parameter": "a0", "values": [-0.2, 0, 0.2],
            "inner": {"n": 3, "h": 1, "a0": 0, "kappa": 1, "b0": 1, "t_span": 3}}}"#,
    );
    let a = ricci_lab(&["sweep", "--config", "s.json", "--out", "a"], d.path(), None);
    let b = ricci_lab(&["sweep", "--config", "s.json", "--out", "b"], d.path(), None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    for f in ["sweep.csv", "sweep.json"] {
        assert_eq!(
            std::fs::read(d.path().join("a").join(f)).unwrap(),
            std::fs::read(d.path().join("b").join(f)).unwrap()
        );
    }
    let csv = std::fs::read_to_string(d.path().join("a/sweep.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(
        labels,
        ["INCOMPLETE_OR_INCONSISTENT", "RICCI_FLAT", "INCOMPLETE_OR_INCONSISTENT"]
    );

    write(
        d.path(),
        "empty.json",
        r#"{"sweep": {"parameter": "a0", "values": [], "inner": {"n": 3, "h": 1, "a0": 0, "b0": 1, "t_span": 1}}}"#,
    );
    let o = ricci_lab(&["sweep", "--config", "empty.json", "--out", "e"], d.path(), None);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.path().join("e/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("value,label"));
}
