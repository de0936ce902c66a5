use std::path::Path;
use std::process::{Command, Output};

fn bellfilter(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellfilter"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn prepare_distill_measure() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellfilter(
        &[
            "prepare", "--form", "2", "--a", "0.44", "--p", "0.063", "--out", "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let out = bellfilter(&["distill", "--state", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classification"], "bell_diagonalizable");
    assert!((v["success_probability"].as_f64().unwrap() - 2.0 * 0.44 * 0.44).abs() < 1e-9);

    let out = bellfilter(&["measure", "--state", "s.json"], dir.path());
    assert!((json(&out)["concurrence"].as_f64().unwrap() - 0.6036438731).abs() < 1e-9);
}

#[test]
fn tomo_counts_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    bellfilter(
        &[
            "prepare", "--form", "1", "--a", "0.23", "--p", "0.013", "--out", "s.json",
        ],
        dir.path(),
    );
    let out = bellfilter(
        &[
            "tomo", "--state", "s.json", "--budget", "1e5", "--seed", "3", "--out", "c.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = bellfilter(
        &[
            "tomo", "--counts", "c.csv", "--budget", "1e5", "--out", "r.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let truth =
        bellfilter_core::channels::rho_form1(0.23, (1.0f64 - 0.23 * 0.23).sqrt(), 0.013).unwrap();
    let rec = bellfilter::formats::read_state(&dir.path().join("r.json")).unwrap();
    assert!(bellfilter_core::state::fidelity(&rec, &truth) > 0.99);
}

#[test]
fn run_reports_json_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellfilter(
        &["run", "--form", "1", "--a", "0.23", "--p", "0.013"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["s_after"].as_f64().unwrap() - 2.6687078511).abs() < 1e-8);

    let out = bellfilter(
        &[
            "run",
            "--form",
            "1",
            "--a",
            "0.23",
            "--p",
            "0.013",
            "--mode",
            "tomo",
            "--bootstrap",
            "5",
            "--seed",
            "4",
            "--format",
            "table",
            "--compare",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("±"));
    assert!(text.contains("published"));
}

#[test]
fn custom_state_quasi_distillable_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    // 0.6 |Ψ+⟩⟨Ψ+| + 0.4 |HH⟩⟨HH|
    let state = r#"[
        [[0.4, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [0.3, 0], [0.3, 0], [0, 0]],
        [[0, 0], [0.3, 0], [0.3, 0], [0, 0]],
        [[0, 0], [0, 0], [0, 0], [0, 0]]
    ]"#;
    std::fs::write(dir.path().join("q.json"), state).unwrap();
    let out = bellfilter(&["run", "--state", "q.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classification"], "quasi_distillable");
    assert!(v["filters"].is_null());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_p = bellfilter(
        &["run", "--form", "1", "--a", "0.23", "--p", "1.5"],
        dir.path(),
    );
    assert_eq!(bad_p.status.code(), Some(2));
    let no_source = bellfilter(&["run"], dir.path());
    assert_eq!(no_source.status.code(), Some(2));
    let missing_file = bellfilter(&["measure", "--state", "absent.json"], dir.path());
    assert_eq!(missing_file.status.code(), Some(2));
    let mismatch = bellfilter(
        &[
            "run",
            "--form",
            "1",
            "--a",
            "0.3",
            "--p",
            "0.013",
            "--compare",
        ],
        dir.path(),
    );
    assert_eq!(mismatch.status.code(), Some(2));
    let zero_budget = bellfilter(
        &[
            "run", "--form", "1", "--a", "0.3", "--p", "0.01", "--mode", "tomo", "--budget", "0",
        ],
        dir.path(),
    );
    assert_eq!(zero_budget.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_three() {
    let code = bellfilter::Error::Core(bellfilter_core::Error::SingularSystem).exit_code();
    assert_eq!(code, 3);
}
