//! End-to-end tests driving the compiled binary: fixed known outputs, the
//! exit-code contract, and byte-level determinism.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_intersective"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn aux_build_fixed_example() {
    let v = json(&run(&["aux", "--d", "2", "x1^2-1"]));
    let aux = &v["result"]["aux"];
    assert_eq!(aux["r_d"], serde_json::json!(["-1"]));
    assert_eq!(aux["lambda"], "2");
    assert_eq!(aux["h_d_text"], "2*x1^2 - 2*x1");
    // provenance is embedded
    assert!(v["config_hash"].is_string());
    assert!(v["result"]["polynomial"]["terms"].is_array());
    assert!(v["result"]["root_choice"]["roots"].is_array());
}

#[test]
fn classify_certifies_x2_minus_1() {
    let v = json(&run(&[
        "classify",
        "--mode",
        "p-intersective",
        "--pmax",
        "50",
        "x1^2-1",
    ]));
    let certs = v["result"]["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 15); // primes up to 50
    for c in certs {
        assert_eq!(c["status"], "certified", "{c}");
    }
}

#[test]
fn classify_rejects_x2_in_p_mode() {
    let v = json(&run(&[
        "classify",
        "--mode",
        "p-intersective",
        "--pmax",
        "3",
        "x^2",
    ]));
    let certs = v["result"]["certificates"].as_array().unwrap();
    let at2 = certs.iter().find(|c| c["p"] == 2).unwrap();
    assert_eq!(at2["status"], "not-intersective");
}

#[test]
fn psi_returns_value_and_count() {
    let v = json(&run(&[
        "primes", "psi", "--x", "10", "--a", "1", "--q", "1",
    ]));
    let value = v["result"]["value"].as_f64().unwrap();
    let expect = 2f64.ln() + 3f64.ln() + 5f64.ln() + 7f64.ln();
    assert!((value - expect).abs() < 1e-12);
    assert_eq!(v["result"]["count"], 4);
}

#[test]
fn psi_accepts_polynomial_weight() {
    let v = json(&run(&[
        "primes", "psi", "--x", "10", "--a", "1", "--q", "1", "--weight", "2*x",
    ]));
    let value = v["result"]["value"].as_f64().unwrap();
    let expect = 2.0 * (2.0 * 2f64.ln() + 3.0 * 3f64.ln() + 5.0 * 5f64.ln() + 7.0 * 7f64.ln());
    assert!((value - expect).abs() < 1e-9);
}

#[test]
fn canonical_json_polynomials_are_accepted() {
    let poly = r#"{"nvars":1,"terms":[{"e":[2],"c":"1"},{"e":[0],"c":"-1"}]}"#;
    let v = json(&run(&["aux", "--d", "2", poly]));
    assert_eq!(v["result"]["aux"]["h_d_text"], "2*x1^2 - 2*x1");
}

#[test]
fn deligne_check_examples() {
    let v = json(&run(&["deligne", "check", "--p", "2", "x^2+y^2+x"]));
    assert_eq!(v["result"]["verdict"]["deligne"], false);
    let v = json(&run(&["deligne", "check", "--p", "5", "x^2+y^2+x"]));
    assert_eq!(v["result"]["verdict"]["deligne"], true);
}

#[test]
fn deligne_criteria_report_shape() {
    let v = json(&run(&["deligne", "criteria", "--pmax", "20", "x^2+y^2-2"]));
    let crits = &v["result"]["criteria"];
    assert!(crits["iv"]["satisfied"].is_object());
    assert!(crits["ii"]["satisfied"].is_object());
    assert_eq!(v["result"]["any_satisfied"], true);
}

#[test]
fn sieve_profile_and_sandwich() {
    let v = json(&run(&["sieve", "profile", "--d", "1", "--Y", "5", "x^2-1"]));
    assert_eq!(v["result"]["profile"]["w_d"], "1");
    let v = json(&run(&[
        "sieve", "sandwich", "--d", "1", "--Y", "5", "--box", "300", "x^2-1",
    ]));
    assert_eq!(v["result"]["exact_certificate"], true);
    assert_eq!(v["result"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn expsum_commands() {
    let v = json(&run(&["expsum", "complete", "--p", "5", "x^2"]));
    let mag = v["result"]["magnitude"].as_f64().unwrap();
    assert!((mag - 5f64.sqrt()).abs() < 1e-12);

    let v = json(&run(&[
        "expsum", "local", "--a", "1", "--q", "25", "--d", "1", "--Y", "5", "x^2-1",
    ]));
    assert!(v["result"]["magnitude"].as_f64().unwrap() < 1e-9 * 25.0);

    let v = json(&run(&[
        "expsum", "salpha", "--alpha", "0/1", "--M", "50", "--d", "1", "--Y", "3", "x^2-1",
    ]));
    assert!(v["result"]["re"].as_f64().unwrap() > 0.0);
}

#[test]
fn energy_from_set_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    std::fs::write(&path, r#"["1/3", "2/3"]"#).unwrap();
    let v = json(&run(&[
        "expsum",
        "energy",
        "--m",
        "2",
        "--set",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["result"]["energy"], "6");

    // plain-text set files work too
    let path2 = dir.path().join("set.txt");
    std::fs::write(&path2, "1/3\n2/3\n").unwrap();
    let v = json(&run(&[
        "expsum",
        "energy",
        "--m",
        "2",
        "--set",
        path2.to_str().unwrap(),
    ]));
    assert_eq!(v["result"]["energy"], "6");
}

#[test]
fn extremal_solve_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, "[1, 4, 9]").unwrap();
    let v = json(&run(&[
        "extremal",
        "solve",
        "--x-file",
        path.to_str().unwrap(),
        "--N",
        "10",
    ]));
    assert_eq!(v["result"]["D"], 4);
}

#[test]
fn extremal_increment_on_odds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    for v in (1..=99u64).step_by(2) {
        writeln!(f, "{v}").unwrap();
    }
    drop(f);
    let v = json(&run(&[
        "extremal",
        "increment",
        "--set-file",
        path.to_str().unwrap(),
        "--q",
        "2",
        "--gamma",
        "0.0025",
        "--ambient",
        "100",
    ]));
    assert_eq!(v["result"]["outcome"]["hypothesis_met"], true);
    assert_eq!(v["result"]["outcome"]["conclusion_holds"], true);
}

#[test]
fn dtable_emits_csv_when_asked() {
    let out = run(&[
        "--format", "csv", "extremal", "dtable", "--poly", "x^2-1", "--nmax", "40", "--steps", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("N,x_size,D,ratio,method,optimal\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = run(&["aux", "scan", "--dmax", "4", "--pmax", "7", "x^2-1"]);
    let b = run(&["aux", "scan", "--dmax", "4", "--pmax", "7", "x^2-1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_code_contract() {
    // 2: usage
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    // 3: cap exceeded
    let out = bin()
        .env("INTERSECTIVE_BOX_VOLUME_CAP", "10")
        .args(["expsum", "complete", "--p", "31", "x^2+y^2+z^2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // 4: invariant violation (a strangled cap makes criterion 1 fail)
    let out = bin()
        .env("INTERSECTIVE_BOX_VOLUME_CAP", "10")
        .args(["verify", "--only", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    // verify --only 1 passes normally and exits 0
    let out = run(&["verify", "--only", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["failures"], 0);
}

#[test]
fn config_file_round_trip_via_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.toml");
    std::fs::write(&path, "seed = 99\n").unwrap();
    let a = bin()
        .args([
            "--config",
            path.to_str().unwrap(),
            "aux",
            "--d",
            "2",
            "x^2-1",
        ])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    // a different config changes the hash but not the math
    let b = json(&run(&["aux", "--d", "2", "x^2-1"]));
    assert_ne!(v["config_hash"], b["config_hash"]);
    assert_eq!(v["result"]["aux"], b["result"]["aux"]);
}
