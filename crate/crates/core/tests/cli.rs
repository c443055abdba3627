use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticritical"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(o: &Output) -> f64 {
    stdout(o).lines().next().unwrap().parse().unwrap()
}

#[test]
fn analytic_qfi_example() {
    let o = run(&["qfi", "--family", "effective_low", "--x", "0.25", "--method", "analytic"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((value(&o) - 0.0138889).abs() < 1e-7);
}

#[test]
fn lmg_gap_example() {
    let o = run(&["gap", "--family", "lmg", "--N", "200", "--g", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.0\n");
}

#[test]
fn critical_point_exit_code() {
    let o = run(&["qfi", "--family", "effective_low", "--x", "1.0", "--method", "analytic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("CriticalPointGuard"));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn truncation_guard_exit_code() {
    let o = run(&["gap", "--family", "effective_high", "--x", "400", "--n-max", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("TruncationGuard"));
}

#[test]
fn validation_exit_codes() {
    for args in [
        &["nonsense"][..],
        &["qfi", "--family", "effective_low", "--x", "0.25", "--frobnicate"],
        &["qfi", "--family", "dicke", "--x", "0.25"],
        &["qfi", "--family", "lmg", "--g", "0.1", "--N", "1"],
        &["qfi", "--family", "lmg"],
        &["qfi", "--family", "effective_low", "--x", "0.25", "--method", "guess"],
        &["sweep", "--family", "lmg", "--grid", "0:1:1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn methods_agree() {
    let base = ["qfi", "--family", "effective_high", "--x", "4"];
    let vals: Vec<f64> = ["analytic", "spectral_sum", "state_fd"]
        .iter()
        .map(|m| {
            let mut a = base.to_vec();
            a.extend_from_slice(&["--method", m]);
            value(&run(&a))
        })
        .collect();
    let exact = 16.0 / (8.0 * 25.0);
    for v in vals {
        assert!((v - exact).abs() < 1e-5 * exact, "{v}");
    }
}

#[test]
fn stdout_is_deterministic() {
    let args = ["qfi", "--family", "tfim", "--N", "8", "--g", "0.7", "--verbose"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn sweep_files_are_reproducible_and_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let o = run(&[
            "sweep", "--family", "lmg", "--N", "30", "--grid", "0:0.9:10", "--jobs", jobs, "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(&p).unwrap()
    };
    let a = out("a.csv", "1");
    let b = out("b.csv", "3");
    let c = out("c.csv", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 11);
    let meta = dir.path().join("a.csv.meta.json");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(meta).unwrap()).unwrap();
    assert_eq!(json["points"], 10);
    assert_eq!(json["config"]["kind"], "lmg");
    assert!(json["config"]["settings"]["truncation_tol"].is_number());
}

#[test]
fn sweep_to_stdout_flags_bad_points() {
    let o = run(&["sweep", "--family", "effective", "--grid", "0.5,1.5", "--fd", "false"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with(",ok"));
    assert!(lines[2].ends_with(",CriticalPointGuard"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_template_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let template = stdout(&run(&["template"]));
    let t = write(dir.path(), "t.conf", &template);
    let a = run(&["gap", "--config", &t, "--family", "lmg", "--g", "0.3", "--N", "20"]);
    let b = run(&["gap", "--family", "lmg", "--g", "0.3", "--N", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let c = write(dir.path(), "c.conf", "family = effective_low\nx = 0.5\nmethod = analytic\n");
    assert!((value(&run(&["qfi", "--config", &c])) - 0.125).abs() < 1e-12);
    // flag beats file
    assert!((value(&run(&["qfi", "--config", &c, "--x", "0.25"])) - 1.0 / 72.0).abs() < 1e-12);

    let bad = write(dir.path(), "bad.conf", "family = lmg\nwibble = 3\n");
    let o = run(&["gap", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wibble"));
}

#[test]
fn converge_and_adiabatic() {
    let o = run(&["converge", "--family", "effective_low", "--x", "0.5", "--levels", "20,40,80", "--verbose"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("n_max,ground_energy"));
    assert!(s.contains("converged_at="));
    let o = run(&["converge", "--family", "effective_low", "--x", "0.5", "--levels", "20,20"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["adiabatic", "--family", "effective_low", "--x", "0.25", "--schedule", "constant", "--T", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&o), 0.0);
}

#[test]
fn version() {
    let o = run(&["version"]);
    assert_eq!(stdout(&o), format!("anticritical {}\n", env!("CARGO_PKG_VERSION")));
}
