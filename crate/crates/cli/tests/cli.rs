use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_relaynet");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn preset(dir: &Path, name: &str) -> String {
    let p = dir.join(format!("{name}.json"));
    fs::write(&p, format!("{{\"format_version\": 1, \"preset\": {{\"name\": \"{name}\"}}}}")).unwrap();
    s(&p)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn optimize_then_evaluate_the_best_law() {
    let d = tempfile::tempdir().unwrap();
    let ch = preset(d.path(), "identity-direct");
    let law = s(&d.path().join("best.json"));
    let o = run(&["optimize", "--channel", &ch, "--theorem", "t1", "--grid", "8", "--seed", "3", "--law-out", &law]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let opt = json(&o);
    assert_eq!(opt["format_version"], 1);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("t1: best"), "{stderr}");
    assert!(!stderr.contains("no --seed"));

    let e = run(&["eval", "--channel", &ch, "--law", &law]);
    assert!(e.status.success());
    let rep = json(&e);
    assert_eq!(rep["objective_bits"], opt["report"]["objective_bits"]);
    assert_eq!(rep["law_hash"], opt["report"]["law_hash"]);

    // nats only rescale the output
    let n = json(&run(&["eval", "--channel", &ch, "--law", &law, "--nats"]));
    let bits = rep["objective_bits"].as_f64().unwrap();
    let nats = n["objective_nats"].as_f64().unwrap();
    assert!((nats - bits * std::f64::consts::LN_2).abs() < 1e-12);

    // a t1 law evaluates under t2 through the embedding
    let t2 = json(&run(&["eval", "--channel", &ch, "--law", &law, "--theorem", "t2", "--df", "zero"]));
    assert!((t2["objective_bits"].as_f64().unwrap() - bits).abs() < 1e-9);
}

#[test]
fn missing_seed_defaults_to_zero_and_says_so() {
    let d = tempfile::tempdir().unwrap();
    let ch = preset(d.path(), "all-noise");
    let a = run(&["optimize", "--channel", &ch, "--theorem", "t2", "--grid", "2", "--max-iters", "1"]);
    assert!(a.status.success());
    assert!(String::from_utf8_lossy(&a.stderr).contains("no --seed given, using seed 0"));
    let b = run(&["optimize", "--channel", &ch, "--theorem", "t2", "--grid", "2", "--max-iters", "1", "--seed", "0"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let ch = preset(d.path(), "identity-direct");
    let bad = d.path().join("bad.json");
    fs::write(&bad, "{\"format_version\": 1, \"preset\": {\"name\": \"nope\"}}").unwrap();
    assert_eq!(run(&["optimize", "--channel", &s(&bad), "--theorem", "t1"]).status.code(), Some(2));
    assert_eq!(run(&["optimize", "--channel", &ch, "--theorem", "t1", "--grid", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--jobs", "0", "fm", "t1"]).status.code(), Some(2));
    assert_eq!(run(&["fm", "t1", "--eliminate", "NOPE"]).status.code(), Some(2));
    // grid too fine for the slice cap on a ternary compression alphabet
    let tern = d.path().join("tern.json");
    fs::write(&tern, r#"{"format_version": 1, "preset": {"name": "identity-direct"}, "sizes": {"Yh1": 3}}"#).unwrap();
    let big = run(&["optimize", "--channel", &s(&tern), "--theorem", "t1", "--grid", "4096", "--seed", "0"]);
    assert_eq!(big.status.code(), Some(3), "{}", String::from_utf8_lossy(&big.stderr));
}

#[test]
fn fm_unknown_variable_is_named() {
    let o = run(&["fm", "t1", "--eliminate", "RS1,R999"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("R999"));
}

#[test]
fn fm_without_elimination_prints_the_pruned_input() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["fm", "t1-reduced"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    // reading it back and running again is a fixed point
    let p = d.path().join("sys.txt");
    fs::write(&p, &text).unwrap();
    let again = run(&["fm", &s(&p)]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn fm_check_reports_a_verdict() {
    let d = tempfile::tempdir().unwrap();
    let rep = d.path().join("r.json");
    let out = d.path().join("sys.txt");
    let o = run(&[
        "fm", "t1", "--eliminate-aux", "--check-against", "t1-reduced", "--bindings", "10", "--seed", "1",
        "--out", &s(&out), "--report", &s(&rep),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("verdict: equivalent (10/10"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["eliminated"].as_array().unwrap().len(), 4);
    let sys = fs::read_to_string(&out).unwrap();
    assert_eq!(sys.lines().next(), Some("vars: RBAR"));
}

#[test]
fn sim_writes_json_and_csv() {
    let d = tempfile::tempdir().unwrap();
    let ch = preset(d.path(), "identity-direct");
    let law = s(&d.path().join("law.json"));
    assert!(run(&["optimize", "--channel", &ch, "--theorem", "t1", "--grid", "4", "--seed", "0", "--law-out", &law])
        .status
        .success());
    let csv = d.path().join("s.csv");
    let o = run(&["sim", "--channel", &ch, "--law", &law, "--n", "50", "--trials", "4", "--seed", "2", "--csv", &s(&csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["blocks_decoded"], 8);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("trials,blocks_decoded,relay1_covering"));
    // a t2 law is refused
    let t2 = d.path().join("t2.json");
    assert!(run(&["optimize", "--channel", &ch, "--theorem", "t2", "--grid", "2", "--seed", "0", "--law-out", &s(&t2)])
        .status
        .success());
    assert_eq!(run(&["sim", "--channel", &ch, "--law", &s(&t2), "--seed", "0"]).status.code(), Some(2));
}

#[test]
fn covering_sweep_emits_one_row_per_point() {
    let d = tempfile::tempdir().unwrap();
    let ch = d.path().join("bsc.json");
    fs::write(
        &ch,
        r#"{"format_version": 1, "preset": {"name": "binary-symmetric-links", "links":
            {"sender_dest": 0.1, "sender_relay1": 0.1, "sender_relay2": 0.1, "relay1_dest": 0.1, "relay2_dest": 0.1}}}"#,
    )
    .unwrap();
    let law = s(&d.path().join("law.json"));
    assert!(run(&["optimize", "--channel", &s(&ch), "--theorem", "t1", "--grid", "2", "--seed", "0", "--law-out", &law])
        .status
        .success());
    let o = run(&[
        "sim", "--channel", &s(&ch), "--law", &law, "--sweep", "rh1", "0:1:0.25", "--n", "200", "--trials", "50",
        "--seed", "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("rh1,"));
    let fr: Vec<f64> = rows[1..].iter().map(|r| r.split(',').nth(6).unwrap().parse().unwrap()).collect();
    for w in fr.windows(2) {
        let p = w[0].max(w[1]);
        assert!(w[1] >= w[0] - 3.0 * (p * (1.0 - p) / 50.0).sqrt(), "{fr:?}");
    }
    assert_eq!(run(&["sim", "--channel", &s(&ch), "--law", &law, "--sweep", "rh1", "1:0:0.1"]).status.code(), Some(2));
    assert_eq!(run(&["sim", "--channel", &s(&ch), "--law", &law, "--sweep", "rbar", "0:1:0.1"]).status.code(), Some(2));
}
