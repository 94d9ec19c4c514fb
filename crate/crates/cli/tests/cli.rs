use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcontest"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("pcontest-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ruling_k_window_for_four_points_at_p_one() {
    let o = run(&["ruling-k", "--n", "4", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "{2}\n");
}

#[test]
fn simulate_writes_one_classified_row_per_run_and_a_manifest() {
    let d = scratch("sim");
    let out = d.join("runs.csv");
    let o = run(&[
        "simulate", "--n", "3", "--p", "1.2", "--dist", "uniform", "--steps", "2000", "--runs", "20", "--seed", "7",
        "--out", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("seed,stream,T,steps,min_xN1"));
    for l in &lines[1..] {
        assert!(l.contains("near-0") || l.contains("near-1") || l.contains("undecided"), "{l}");
    }
    let manifest = std::fs::read_to_string(d.join("runs.csv.manifest")).unwrap();
    assert!(manifest.contains("subcommand=simulate\n"));
    assert!(manifest.contains("seed=7\n"));
}

#[test]
fn replaying_a_manifest_reproduces_outputs_byte_for_byte() {
    let d = scratch("replay");
    let out = d.join("runs.csv");
    let ev = d.join("events.jsonl");
    let o = run(&[
        "simulate", "--n", "4", "--p", "0.9", "--steps", "3000", "--runs", "6", "--seed", "3", "--checkpoints",
        "10,1000", "--out", s(&out), "--events", s(&ev),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (a, e) = (std::fs::read(&out).unwrap(), std::fs::read(&ev).unwrap());
    assert_eq!(String::from_utf8_lossy(&e).lines().count(), 12);
    std::fs::remove_file(&out).unwrap();
    std::fs::remove_file(&ev).unwrap();
    let o = run(&["replay", s(&d.join("runs.csv.manifest"))]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), a);
    assert_eq!(std::fs::read(&ev).unwrap(), e);
}

#[test]
fn outputs_do_not_depend_on_the_thread_budget() {
    let d = scratch("threads");
    let mut outs = Vec::new();
    for t in ["1", "4", "8"] {
        let out = d.join(format!("runs{t}.csv"));
        let o = run(&[
            "simulate", "--n", "5", "--p", "0.7", "--steps", "2000", "--runs", "16", "--seed", "11", "--threads", t,
            "--out", s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let d = scratch("config");
    let cfg = d.join("run.cfg");
    std::fs::write(&cfg, "# small run\nn = 3\np = 1.2\nsteps = 100\nruns = 4\nseed = 5\n").unwrap();
    let o = run(&["simulate", "--config", s(&cfg), "--runs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);
    let manifest = String::from_utf8(o.stderr).unwrap();
    assert!(manifest.contains("runs=2\n") && manifest.contains("steps=100\n"));
}

#[test]
fn config_file_may_carry_the_subcommand() {
    let d = scratch("subcmd");
    let cfg = d.join("k.cfg");
    std::fs::write(&cfg, "subcommand=ruling-k\nn=4\np=1\n").unwrap();
    let o = run(&["--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "{2}\n");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["simulate", "--n", "3", "--p", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--n", "2", "--p", "1", "--steps", "10"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--poly", "e11"]).status.code(), Some(2));
    assert_eq!(run(&["case-table", "--a", "0.5", "--mu", "0.1", "--m", "2", "--p", "1"]).status.code(), Some(2));
    let d = scratch("badcfg");
    let cfg = d.join("bad.cfg");
    std::fs::write(&cfg, "n=3\nwidth=4\n").unwrap();
    assert_eq!(run(&["simulate", "--config", s(&cfg), "--p", "1"]).status.code(), Some(2));
}

#[test]
fn certification_failure_exits_with_one() {
    let d = scratch("certfail");
    let c = d.join("neg.txt");
    std::fs::write(&c, "neg: x1 - 1/2\n").unwrap();
    let o = run(&["certify", "--corpus", s(&c), "--grid", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "failed");
    assert_eq!(v["bound"], "-1/2");
}

#[test]
fn certify_corpus_polynomial_uniform_and_adaptive() {
    let d = scratch("certok");
    let c = d.join("pos.txt");
    std::fs::write(&c, "pos: x1^2 - x1 + 1/2\n").unwrap();
    let out = d.join("cert.json");
    let o = run(&["certify", "--corpus", s(&c), "--grid", "10", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["poly"], "pos");
    assert_eq!(v["grid"], 10);
    assert_eq!(v["verdict"], "certified-positive");
    assert!(v["bound"].as_str().unwrap().contains('/'));
    assert!(v["wall_time_s"].is_number());
    let o = run(&["certify", "--corpus", s(&c), "--mode", "adaptive", "--depth", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"]["status"], "certified");
}

#[test]
fn case_table_text_and_json() {
    let o = run(&["case-table", "--a", "0.2", "--mu", "0.7", "--m", "3", "--p", "1.2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["case"], "B");
    let o = run(&["case-table", "--a", "0.2", "--mu", "0.7", "--m", "3", "--p", "1.2"]);
    let t = String::from_utf8(o.stdout).unwrap();
    assert!(t.lines().any(|l| l.starts_with("case") && l.ends_with('B')), "{t}");
}

#[test]
fn lambda_point_and_scan() {
    let o = run(&["lambda", "--a", "0.25", "--b", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["lambda_closed"].as_f64().unwrap().abs() < 1e-9);
    let o = run(&["lambda", "--scan", "5"]);
    let t = String::from_utf8(o.stdout).unwrap();
    assert_eq!(t.lines().next().unwrap(), "a,b,lambda_closed,lambda_quad");
    assert_eq!(t.lines().count(), 26);
}

#[test]
fn drift_report_is_json() {
    let o = run(&["drift", "--n", "3", "--p", "1.2", "--h", "pair", "--region-max", "0.25", "--samples", "20000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"], 20000);
    assert_eq!(v["verdict"], "consistent-with-supermartingale");
}

#[test]
fn suite_reports_and_exit_status_follow_the_criterion() {
    let o = run(&["suite", "--name", "thm3", "--runs", "10", "--steps", "20000"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pass = v["pass"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if pass { 0 } else { 1 }));
    assert_eq!(v["sensitivity"].as_array().unwrap().len(), 3);
    assert_eq!(run(&["suite", "--name", "thm9"]).status.code(), Some(2));
}

#[test]
fn corpus_report_lists_comparisons() {
    let d = scratch("corpus");
    let derived = d.join("derived.txt");
    let o = run(&["corpus", "--points", "20", "--e9-grid", "50", "--derive-out", s(&derived)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["comparisons"].as_array().unwrap().is_empty());
    assert_eq!(v["e9_e10"]["e10_is_square_form"], true);
    assert!(v["unexplained"].as_array().unwrap().is_empty());
    let text = std::fs::read_to_string(&derived).unwrap();
    assert!(text.lines().any(|l| l == "poly box_e8"));
}
