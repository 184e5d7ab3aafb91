use std::process::{Command, Output};

use ppkit::sweep::{read_jsonl, SweepSummary};

fn ppkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppkit"))
        .args(args)
        .env_remove("PPKIT_MAX_Q")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn field_info_reports_modulus_and_tower() {
    let o = ppkit(&["field-info", "--p", "3", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("F_9 = F_3[t]/(t^2 + 1)"), "{out}");
    assert!(out.contains("\"u\":4"));
}

#[test]
fn check_agreement_and_disagreement() {
    let o = ppkit(&["check", "--theorem", "3.2", "--p", "5", "--delta", "0", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    // 3.9(ii) predicts γ = 1 at Tr(δ) = 6, the oracle disagrees
    let o = ppkit(&["check", "--theorem", "3.9", "--p", "7", "--delta", "3", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("DISAGREE"));
}

#[test]
fn usage_domain_and_io_codes() {
    assert_eq!(ppkit(&["nope"]).status.code(), Some(64));
    assert_eq!(ppkit(&["sweep", "--p", "3"]).status.code(), Some(64));
    assert_eq!(ppkit(&["field-info", "--p", "6"]).status.code(), Some(65));
    assert_eq!(
        ppkit(&["check", "--theorem", "3.19", "--p", "3", "--delta", "0", "--gamma", "1"])
            .status
            .code(),
        Some(65)
    );
    let o = ppkit(&["sweep", "--theorem", "3.1", "--p", "3", "--out", "/no/such/dir/r.jsonl"]);
    assert_eq!(o.status.code(), Some(66));
    assert_eq!(ppkit(&["--help"]).status.code(), Some(0));
}

#[test]
fn max_q_env_bounds_the_domain() {
    let o = Command::new(env!("CARGO_BIN_EXE_ppkit"))
        .args(["sweep", "--theorem", "3.2", "--p", "11"])
        .env("PPKIT_MAX_Q", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn sweep_writes_jsonl_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("r.jsonl");
    let o = ppkit(&["sweep", "--theorem", "3.4", "--p", "3", "--out", jsonl.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary: SweepSummary = serde_json::from_str(stdout(&o).trim()).unwrap();
    let records = read_jsonl(&std::fs::read_to_string(&jsonl).unwrap()).unwrap();
    assert_eq!(summary, SweepSummary::of(&records));
    assert_eq!(records.len(), 9 * 8);

    let csv = dir.path().join("r.csv");
    let o = ppkit(&[
        "sweep", "--theorem", "3.4", "--p", "3", "--format", "csv", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("theorem_id,p,m,q,"));
    assert_eq!(text.lines().count(), records.len() + 1);
}

#[test]
fn sweep_is_deterministic_across_workers() {
    let a = ppkit(&["sweep", "--theorem", "3.8", "--p", "7", "--workers", "1"]);
    let b = ppkit(&["sweep", "--theorem", "3.8", "--p", "7", "--workers", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn probing_outside_the_hypothesis() {
    let o = ppkit(&["sweep", "--theorem", "3.8", "--p", "3", "--gamma-domain", "fq2_star"]);
    assert_eq!(o.status.code(), Some(64));
    let o = ppkit(&[
        "sweep", "--theorem", "3.8", "--p", "3", "--gamma-domain", "fq2_star", "--probe-hypotheses",
    ]);
    let summary: SweepSummary =
        serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(summary.total, 9 * 8);
    assert_eq!(summary.out_of_hypothesis, 9 * (8 - 2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plan.json");
    std::fs::write(&cfg, r#"{"theorem": "3.13", "p": 3, "m": 2, "workers": 2}"#).unwrap();
    let o = ppkit(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let records = read_jsonl(&stdout(&o)).unwrap();
    assert!(records.iter().all(|r| r.i == Some(1) && r.q == 9));

    let o = ppkit(&["sweep", "--config", cfg.to_str().unwrap(), "--theorem", "3.12"]);
    let records = read_jsonl(&stdout(&o)).unwrap();
    assert!(records.iter().all(|r| r.theorem_id.to_string() == "3.12"));

    std::fs::write(&cfg, r#"{"theorem": "3.13", "colour": 1}"#).unwrap();
    assert_eq!(ppkit(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn trdelta_sets_the_trace() {
    let o = ppkit(&[
        "check", "--theorem", "3.6", "--p", "13", "--m", "1", "--trdelta", "0", "--gamma", "6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3.6(ii)"));
    let o = ppkit(&["check", "--theorem", "3.12", "--p", "7", "--trdelta", "4", "--gamma", "1"]);
    assert!(stdout(&o).contains("Tr(delta) = 4"));
}

#[test]
fn decompose_reports_the_sign_of_3_18() {
    let o = ppkit(&["decompose", "--theorem", "3.18", "--p", "7", "--delta", "1", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ppkit(&[
        "decompose", "--theorem", "3.4", "--p", "11", "--delta", "5", "--gamma", "2", "--format",
        "jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "match");
    // below q = 7 only the value map is available
    let o = ppkit(&["decompose", "--theorem", "3.4", "--p", "5", "--delta", "5", "--gamma", "2"]);
    assert!(stdout(&o).contains("value map"));
}

#[test]
fn directions_on_a_family() {
    let o = ppkit(&[
        "directions", "--p", "3", "--map", "family", "--theorem", "3.2", "--delta", "1",
        "--restricted",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let json: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    let d = json["directions"].as_array().unwrap().len();
    let p = json["permuting_gammas"].as_array().unwrap().len();
    assert_eq!(d + p, 9);
    assert!(json["restricted_directions"].is_array());
    let o = ppkit(&["directions", "--p", "2", "--m", "3", "--map", "random", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
}
